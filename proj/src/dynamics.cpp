#include "qchain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace qchain {
namespace {

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("time grid is empty");
    if (times.front() != 0.0) throw std::invalid_argument("time grid must start at t = 0");
    for (size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("time grid must increase strictly");
        }
    }
}

void check_initial(const EffectiveMatrix& matrix, const Eigen::VectorXcd& initial) {
    if (initial.size() != matrix.order()) {
        throw std::invalid_argument("initial vector size does not match matrix order");
    }
    if (std::abs(initial.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("initial vector must have unit norm");
    }
}

AmplitudeTrajectory finalize(const EffectiveMatrix& matrix, std::vector<double> times,
                             Eigen::MatrixXcd amplitudes) {
    AmplitudeTrajectory traj;
    traj.times = std::move(times);
    traj.amplitudes = std::move(amplitudes);
    traj.probabilities = traj.amplitudes.cwiseAbs2();
    traj.p_photon = (1.0 - traj.probabilities.rowwise().sum().array()).matrix();
    traj.gamma = matrix.gamma;
    return traj;
}

Eigen::MatrixXcd evolve_modal(const EffectiveMatrix& matrix, const Eigen::VectorXcd& initial,
                              const std::vector<double>& times) {
    const ModeSet modes = characteristic_roots(matrix);
    const ModalExpansion expansion = modal_expansion(modes, initial);
    Eigen::MatrixXcd amplitudes(static_cast<int>(times.size()), matrix.order());
    for (size_t k = 0; k < times.size(); ++k) {
        amplitudes.row(static_cast<int>(k)) = expansion.reconstruct(times[k]).transpose();
    }
    return amplitudes;
}

using OdeState = std::vector<std::complex<double>>;

Eigen::MatrixXcd evolve_adaptive(const EffectiveMatrix& matrix, const Eigen::VectorXcd& initial,
                                 const std::vector<double>& times, const EvolveOptions& options) {
    namespace odeint = boost::numeric::odeint;
    const int n = matrix.order();

    OdeState state(initial.data(), initial.data() + n);
    Eigen::MatrixXcd amplitudes(static_cast<int>(times.size()), n);
    int row = 0;

    // Stall guard: with an unreachable tolerance the controller can shrink
    // the step until it underflows, after which time stops advancing while
    // the error estimate reads zero. A generous evaluation budget converts
    // that silent spin into a solver failure.
    const long eval_budget = 10'000'000 + 1000 * static_cast<long>(times.size());
    long evals = 0;
    auto system = [&matrix, n, &evals, eval_budget](const OdeState& x, OdeState& dxdt, double) {
        if (++evals > eval_budget) {
            throw SolverError("adaptive integrator stalled: step size collapsed");
        }
        dxdt.resize(x.size());
        Eigen::Map<const Eigen::VectorXcd> xm(x.data(), n);
        Eigen::Map<Eigen::VectorXcd> dm(dxdt.data(), n);
        dm = matrix.m * xm;
    };
    auto observer = [&amplitudes, &row, n](const OdeState& x, double) {
        amplitudes.row(row++) = Eigen::Map<const Eigen::VectorXcd>(x.data(), n).transpose();
    };

    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_dopri5<OdeState>());
    const double dt0 = 0.1 / std::max(1.0, static_cast<double>(n) * matrix.gamma);
    try {
        odeint::integrate_times(stepper, system, state, times.begin(), times.end(), dt0, observer);
    } catch (const SolverError&) {
        throw;
    } catch (const std::exception& e) {
        throw SolverError(std::string("adaptive integration failed: ") + e.what());
    }
    if (row != static_cast<int>(times.size())) {
        throw SolverError("adaptive integration did not reach the final time");
    }
    return amplitudes;
}

}  // namespace

AmplitudeTrajectory evolve(const EffectiveMatrix& matrix, const Eigen::VectorXcd& initial,
                           const std::vector<double>& times, const EvolveOptions& options) {
    check_times(times);
    check_initial(matrix, initial);

    switch (options.method) {
        case EvolveMethod::Modal:
            return finalize(matrix, times, evolve_modal(matrix, initial, times));
        case EvolveMethod::AdaptiveOde:
            return finalize(matrix, times, evolve_adaptive(matrix, initial, times, options));
        case EvolveMethod::Auto:
            break;
    }
    try {
        return finalize(matrix, times, evolve_modal(matrix, initial, times));
    } catch (const DefectiveEigenbasisError&) {
        return finalize(matrix, times, evolve_adaptive(matrix, initial, times, options));
    }
}

std::vector<double> uniform_time_grid(double t_max, int samples) {
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    if (samples < 2) throw std::invalid_argument("need at least 2 samples");
    std::vector<double> times(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        times[static_cast<size_t>(i)] =
            t_max * (static_cast<double>(i) / static_cast<double>(samples - 1));
    }
    return times;
}

Eigen::VectorXd photon_emission_probability(const AmplitudeTrajectory& trajectory) {
    return trajectory.p_photon;
}

ResonantState analytic_amplitudes_resonant(int n_qubits, int excited_index,
                                           ResonantParity parity, double t, double gamma) {
    if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
    if (excited_index < 1 || excited_index > n_qubits) {
        throw std::invalid_argument("excited_index out of range");
    }
    if (t < 0.0) throw std::invalid_argument("time must be non-negative");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

    const double n = static_cast<double>(n_qubits);
    const double transient = std::exp(-gamma * n * t / 2.0) / n;

    ResonantState state;
    state.amplitudes.resize(n_qubits);
    for (int m = 1; m <= n_qubits; ++m) {
        double trapped;
        if (parity == ResonantParity::Even) {
            trapped = (m == excited_index) ? (n - 1.0) / n : -1.0 / n;
        } else {
            const int distance = std::abs(m - excited_index);
            trapped = (distance % 2 == 1) ? 1.0 / n : ((m == excited_index) ? (n - 1.0) / n : -1.0 / n);
        }
        // The transient carries a sign opposite to the trapped offset for the
        // odd-distance qubits at odd-pi spacing, and +1/N everywhere else.
        double sign = 1.0;
        if (parity == ResonantParity::Odd && std::abs(m - excited_index) % 2 == 1) sign = -1.0;
        state.amplitudes[m - 1] = trapped + sign * transient;
    }
    state.p_photon = (1.0 - std::exp(-gamma * n * t)) / n;
    return state;
}

PlateauScan find_plateaus(const std::vector<double>& times, const Eigen::VectorXd& p_photon,
                          double eps, double min_width) {
    if (times.size() < 2 || static_cast<int>(times.size()) != p_photon.size()) {
        throw std::invalid_argument("times and p_photon must match and hold at least 2 points");
    }
    if (!(eps > 0.0) || !(min_width > 0.0)) {
        throw std::invalid_argument("eps and min_width must be positive");
    }
    double max_dt = 0.0;
    for (size_t i = 1; i < times.size(); ++i) max_dt = std::max(max_dt, times[i] - times[i - 1]);
    if (2.0 * max_dt > min_width) {
        throw std::invalid_argument(
            "time grid too coarse: need at least 3 points per min_width interval");
    }

    const int n = static_cast<int>(times.size());
    std::vector<double> slope(static_cast<size_t>(n));
    slope[0] = (p_photon[1] - p_photon[0]) / (times[1] - times[0]);
    slope[static_cast<size_t>(n - 1)] =
        (p_photon[n - 1] - p_photon[n - 2]) / (times[static_cast<size_t>(n - 1)] - times[static_cast<size_t>(n - 2)]);
    for (int i = 1; i < n - 1; ++i) {
        slope[static_cast<size_t>(i)] =
            (p_photon[i + 1] - p_photon[i - 1]) /
            (times[static_cast<size_t>(i + 1)] - times[static_cast<size_t>(i - 1)]);
    }

    PlateauScan scan;
    int run_start = -1;
    for (int i = 0; i <= n; ++i) {
        const bool flat = i < n && std::abs(slope[static_cast<size_t>(i)]) < eps;
        if (flat && run_start < 0) run_start = i;
        if (!flat && run_start >= 0) {
            const int run_end = i - 1;
            PlateauInterval interval{times[static_cast<size_t>(run_start)],
                                     times[static_cast<size_t>(run_end)]};
            if (interval.width() >= min_width) {
                if (run_end == n - 1) {
                    scan.saturation = interval;
                } else {
                    scan.interior.push_back(interval);
                }
            }
            run_start = -1;
        }
    }
    return scan;
}

}  // namespace qchain
