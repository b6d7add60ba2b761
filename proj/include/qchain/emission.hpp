// emission.hpp — emitted-photon spectral amplitude and spectrum shape tools.
//
// The forward-emitted amplitude at detuning delta after observation time t is
//   g(delta, t) = -i sum_n exp(-i phi_n) integral_0^t beta_n(t') exp(i delta t') dt'
// with phi_n = k x_n. Two routes are provided: quadrature over a dense stored
// trajectory, and a closed form from the modal expansion where each mode j
// with pole z_j = delta - i lambda_j contributes w_j (1 - exp(i z_j t)) / z_j.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qchain/dynamics.hpp"
#include "qchain/modes.hpp"

namespace qchain {

// Largest trajectory step allowed for the quadrature route:
// 0.01 / max(|delta|_max, N gamma).
double required_time_step(double max_abs_detuning, int n_qubits, double gamma);

// Quadrature route. The trajectory must cover [0, t] with steps no larger
// than required_time_step for the grid of detunings. Uniform grids get an
// endpoint-derivative correction that upgrades the trapezoid rule to
// O(h^4); non-uniform grids fall back to the plain trapezoid rule.
Eigen::VectorXcd photon_amplitude_numeric(const AmplitudeTrajectory& trajectory,
                                          const std::vector<double>& positions,
                                          const Eigen::VectorXd& detunings,
                                          double t);

// Closed-form route from a modal expansion. Poles with |z_j| t < 1e-4 are
// evaluated by series to avoid cancellation; the dark-mode limit z -> 0
// gives the linear-in-t secular term.
Eigen::VectorXcd photon_amplitude_modal(const ModalExpansion& expansion,
                                        const std::vector<double>& positions,
                                        const Eigen::VectorXd& detunings,
                                        double t);

// Single-pole reference 1 / (delta^2 + (N gamma / 2)^2): the long-time shape
// when one superradiant mode at rate N gamma carries all the weight.
Eigen::VectorXd lorentzian_reference(int n_qubits, const Eigen::VectorXd& detunings,
                                     double gamma = 1.0);

enum class SpectrumNormalization { Raw, Peak };

struct SpectrumResult {
    Eigen::VectorXd detunings;
    Eigen::VectorXcd amplitudes;  // g(delta, t)
    Eigen::VectorXd values;       // |g|^2, optionally peak-normalized
    double observation_time = 0.0;
    SpectrumNormalization normalization = SpectrumNormalization::Raw;
};

SpectrumResult make_spectrum(Eigen::VectorXd detunings,
                             Eigen::VectorXcd amplitudes, double observation_time,
                             SpectrumNormalization normalization);

struct SpectralPeak {
    double position = 0.0;
    double height = 0.0;
    double hwhm = 0.0;  // NaN when a half-height crossing is missing
};

// Strict local maxima at least min_height_fraction of the global maximum,
// with half-width measured by linear interpolation to the half-height
// crossings on both sides (one-sided value doubled if a side is missing).
std::vector<SpectralPeak> find_spectral_peaks(const Eigen::VectorXd& xs,
                                              const Eigen::VectorXd& ys,
                                              double min_height_fraction = 0.05);

// Full width at half maximum of the global peak; NaN if either crossing
// falls outside the grid.
double measure_fwhm(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys);

}  // namespace qchain
