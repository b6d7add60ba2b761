// bindings.cpp — pybind11 interface for the qchain core library.
//
// Exposes the chain configuration, the effective coupling matrix, the mode
// analysis, the time propagators and the emission-spectrum tools with Eigen
// types mapped to numpy arrays. The CLI layer stays native; scripting users
// drive the library directly through this module.

#include <complex>
#include <optional>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qchain/chain.hpp"
#include "qchain/dynamics.hpp"
#include "qchain/emission.hpp"
#include "qchain/errors.hpp"
#include "qchain/modes.hpp"

namespace py = pybind11;
using namespace qchain;

PYBIND11_MODULE(_qchain, m) {
    m.doc() = "Single-excitation dynamics and photon emission of a qubit chain "
              "coupled to an open waveguide.";
    m.attr("__version__") = kVersion;

    // Exception hierarchy: both specific failures are SolverError subclasses
    // so callers can catch the family in one clause.
    auto solver_error = py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<DefectiveEigenbasisError>(m, "DefectiveEigenbasisError",
                                                     solver_error.ptr());
    py::register_exception<DegenerateSpectrumError>(m, "DegenerateSpectrumError",
                                                    solver_error.ptr());

    // ---- chain geometry and coupling matrix ----

    py::class_<ChainConfig>(m, "ChainConfig",
                            "Chain geometry and physics parameters. Positions are phases k*x_n; "
                            "an empty list means equidistant spacing with phase kd per step.")
        .def(py::init([](int n_qubits, double gamma, double kd,
                         std::optional<std::vector<double>> positions, int excited_index) {
                 ChainConfig config;
                 config.n_qubits = n_qubits;
                 config.gamma = gamma;
                 config.kd = kd;
                 if (positions) config.positions = *positions;
                 config.excited_index = excited_index;
                 return config;
             }),
             py::arg("n_qubits") = 1, py::arg("gamma") = 1.0, py::arg("kd") = 0.0,
             py::arg("positions") = std::nullopt, py::arg("excited_index") = 1)
        .def_readwrite("n_qubits", &ChainConfig::n_qubits)
        .def_readwrite("gamma", &ChainConfig::gamma)
        .def_readwrite("kd", &ChainConfig::kd)
        .def_readwrite("positions", &ChainConfig::positions)
        .def_readwrite("excited_index", &ChainConfig::excited_index)
        .def_readwrite("initial_amplitudes", &ChainConfig::initial_amplitudes)
        .def("validate", &ChainConfig::validate)
        .def("resolved_positions", &ChainConfig::resolved_positions)
        .def("initial_state", &ChainConfig::initial_state);

    py::class_<EffectiveMatrix>(m, "EffectiveMatrix",
                                "N x N complex-symmetric matrix M with d(beta)/dt = M beta.")
        .def(py::init<>())
        .def_readwrite("m", &EffectiveMatrix::m)
        .def_readwrite("gamma", &EffectiveMatrix::gamma)
        .def("order", &EffectiveMatrix::order);

    m.def("build_effective_matrix", &build_effective_matrix, py::arg("config"));

    py::class_<RateMatrices>(m, "RateMatrices",
                             "Coherent (J) and dissipative (G) qubit-qubit rate matrices.")
        .def_readonly("coherent", &RateMatrices::coherent)
        .def_readonly("dissipative", &RateMatrices::dissipative);

    m.def("coherent_dissipative_rates", &coherent_dissipative_rates, py::arg("config"));

    // ---- characteristic roots and collective states ----

    py::enum_<ModeClass>(m, "ModeClass")
        .value("Dark", ModeClass::Dark)
        .value("Subradiant", ModeClass::Subradiant)
        .value("Superradiant", ModeClass::Superradiant);

    py::class_<ModeSet>(m, "ModeSet",
                        "Characteristic roots lambda_i (sorted by ascending real part) with "
                        "unit-norm eigenvector columns.")
        .def(py::init<>())
        .def_readwrite("roots", &ModeSet::roots)
        .def_readwrite("eigenvectors", &ModeSet::eigenvectors)
        .def_readwrite("gamma", &ModeSet::gamma)
        .def("size", &ModeSet::size)
        .def("__len__", &ModeSet::size)
        .def("complex_energy", &ModeSet::complex_energy, py::arg("i"))
        .def("detuning", &ModeSet::detuning, py::arg("i"))
        .def("decay_rate", &ModeSet::decay_rate, py::arg("i"))
        .def("decay_rates", &ModeSet::decay_rates)
        .def("min_decay_rate", &ModeSet::min_decay_rate)
        .def("default_dark_tol", &ModeSet::default_dark_tol)
        .def("classify", &ModeSet::classify, py::arg("i"), py::arg("dark_tol") = -1.0)
        .def("classification", &ModeSet::classification, py::arg("dark_tol") = -1.0);

    m.def("characteristic_roots", &characteristic_roots, py::arg("matrix"));
    m.def("dark_state_count", &dark_state_count, py::arg("modes"), py::arg("tol") = -1.0);

    py::class_<ModalExpansion>(m, "ModalExpansion",
                               "Coefficients b_j^(n) of beta_n(t) = sum_j b_j^(n) "
                               "exp(lambda_j t); row j, column n.")
        .def(py::init<>())
        .def_readwrite("coefficients", &ModalExpansion::coefficients)
        .def_readwrite("roots", &ModalExpansion::roots)
        .def("reconstruct", &ModalExpansion::reconstruct, py::arg("t"))
        .def("mode_weights", &ModalExpansion::mode_weights);

    m.def("modal_expansion", &modal_expansion, py::arg("modes"), py::arg("initial"));

    py::class_<CollectiveStateSet>(m, "CollectiveStateSet",
                                   "Bi-orthogonal collective states alpha^(i) with "
                                   "sum_n (alpha_n^(i))^2 = 1 and amplitudes A_i.")
        .def(py::init<>())
        .def_readwrite("states", &CollectiveStateSet::states)
        .def_readwrite("amplitudes", &CollectiveStateSet::amplitudes)
        .def_readwrite("roots", &CollectiveStateSet::roots)
        .def("reconstruct", &CollectiveStateSet::reconstruct, py::arg("t"));

    m.def("collective_state_decomposition", &collective_state_decomposition, py::arg("modes"),
          py::arg("initial"));
    m.def("reduced_central_cubic_roots", &reduced_central_cubic_roots, py::arg("gamma") = 1.0,
          "Roots of lambda (lambda + gamma) (lambda + gamma/2) + gamma^3/2 = 0, the reduced "
          "characteristic equation of the five-qubit chain at kd = pi/2 with the central "
          "qubit excited.");

    // ---- time propagation ----

    py::enum_<EvolveMethod>(m, "EvolveMethod")
        .value("Auto", EvolveMethod::Auto)
        .value("Modal", EvolveMethod::Modal)
        .value("AdaptiveOde", EvolveMethod::AdaptiveOde);

    py::class_<EvolveOptions>(m, "EvolveOptions")
        .def(py::init([](EvolveMethod method, double rel_tol, double abs_tol) {
                 EvolveOptions options;
                 options.method = method;
                 options.rel_tol = rel_tol;
                 options.abs_tol = abs_tol;
                 return options;
             }),
             py::arg("method") = EvolveMethod::Auto, py::arg("rel_tol") = 1e-10,
             py::arg("abs_tol") = 1e-12)
        .def_readwrite("method", &EvolveOptions::method)
        .def_readwrite("rel_tol", &EvolveOptions::rel_tol)
        .def_readwrite("abs_tol", &EvolveOptions::abs_tol);

    py::class_<AmplitudeTrajectory>(m, "AmplitudeTrajectory",
                                    "Time grid with complex amplitudes (time, qubit), "
                                    "occupation probabilities and the emitted-photon "
                                    "probability 1 - sum_n |beta_n|^2.")
        .def(py::init<>())
        .def_readwrite("times", &AmplitudeTrajectory::times)
        .def_readwrite("amplitudes", &AmplitudeTrajectory::amplitudes)
        .def_readwrite("probabilities", &AmplitudeTrajectory::probabilities)
        .def_readwrite("p_photon", &AmplitudeTrajectory::p_photon)
        .def_readwrite("gamma", &AmplitudeTrajectory::gamma)
        .def("n_qubits", &AmplitudeTrajectory::n_qubits)
        .def("n_times", &AmplitudeTrajectory::n_times);

    m.def("evolve", &evolve, py::arg("matrix"), py::arg("initial"), py::arg("times"),
          py::arg("options") = EvolveOptions{});
    m.def("uniform_time_grid", &uniform_time_grid, py::arg("t_max"), py::arg("samples"));
    m.def("photon_emission_probability", &photon_emission_probability, py::arg("trajectory"));

    py::enum_<ResonantParity>(m, "ResonantParity")
        .value("Even", ResonantParity::Even)
        .value("Odd", ResonantParity::Odd);

    py::class_<ResonantState>(m, "ResonantState")
        .def(py::init<>())
        .def_readwrite("amplitudes", &ResonantState::amplitudes)
        .def_readwrite("p_photon", &ResonantState::p_photon);

    m.def("analytic_amplitudes_resonant", &analytic_amplitudes_resonant, py::arg("n_qubits"),
          py::arg("excited_index"), py::arg("parity"), py::arg("t"), py::arg("gamma") = 1.0,
          "Closed-form amplitudes at resonant spacing kd = 2 pi n (Even) or "
          "kd = (2n+1) pi (Odd).");

    py::class_<PlateauInterval>(m, "PlateauInterval")
        .def(py::init<>())
        .def_readwrite("t_start", &PlateauInterval::t_start)
        .def_readwrite("t_end", &PlateauInterval::t_end)
        .def("width", &PlateauInterval::width);

    py::class_<PlateauScan>(m, "PlateauScan")
        .def(py::init<>())
        .def_readwrite("interior", &PlateauScan::interior)
        .def_readwrite("saturation", &PlateauScan::saturation);

    m.def("find_plateaus", &find_plateaus, py::arg("times"), py::arg("p_photon"), py::arg("eps"),
          py::arg("min_width"),
          "Maximal runs where |d p_photon / dt| < eps lasting at least min_width.");

    // ---- emitted-photon amplitude and spectrum ----

    m.def("required_time_step", &required_time_step, py::arg("max_abs_detuning"),
          py::arg("n_qubits"), py::arg("gamma"),
          "Largest trajectory step the quadrature route accepts.");
    m.def("photon_amplitude_numeric", &photon_amplitude_numeric, py::arg("trajectory"),
          py::arg("positions"), py::arg("detunings"), py::arg("t"));
    m.def("photon_amplitude_modal", &photon_amplitude_modal, py::arg("expansion"),
          py::arg("positions"), py::arg("detunings"), py::arg("t"));
    m.def("lorentzian_reference", &lorentzian_reference, py::arg("n_qubits"),
          py::arg("detunings"), py::arg("gamma") = 1.0);

    py::enum_<SpectrumNormalization>(m, "SpectrumNormalization")
        .value("Raw", SpectrumNormalization::Raw)
        .value("Peak", SpectrumNormalization::Peak);

    py::class_<SpectrumResult>(m, "SpectrumResult")
        .def(py::init<>())
        .def_readwrite("detunings", &SpectrumResult::detunings)
        .def_readwrite("amplitudes", &SpectrumResult::amplitudes)
        .def_readwrite("values", &SpectrumResult::values)
        .def_readwrite("observation_time", &SpectrumResult::observation_time)
        .def_readwrite("normalization", &SpectrumResult::normalization);

    m.def("make_spectrum", &make_spectrum, py::arg("detunings"), py::arg("amplitudes"),
          py::arg("observation_time"), py::arg("normalization"));

    py::class_<SpectralPeak>(m, "SpectralPeak")
        .def(py::init<>())
        .def_readwrite("position", &SpectralPeak::position)
        .def_readwrite("height", &SpectralPeak::height)
        .def_readwrite("hwhm", &SpectralPeak::hwhm);

    m.def("find_spectral_peaks", &find_spectral_peaks, py::arg("xs"), py::arg("ys"),
          py::arg("min_height_fraction") = 0.05);
    m.def("measure_fwhm", &measure_fwhm, py::arg("xs"), py::arg("ys"),
          "Full width at half maximum of the global peak; NaN if a half-height "
          "crossing is missing.");
}
