// dynamics.hpp — time propagation of the qubit amplitudes.
//
// Two interchangeable propagators for d(beta)/dt = M beta: a modal path that
// expands the initial vector over eigenmodes and sums exponentials at each
// output time, and an adaptive Runge-Kutta path with dense output at the
// requested times. Closed forms for the resonant spacings kd = 2 pi n and
// kd = (2n+1) pi serve as independent references.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qchain/chain.hpp"
#include "qchain/errors.hpp"
#include "qchain/modes.hpp"

namespace qchain {

enum class EvolveMethod { Auto, Modal, AdaptiveOde };

struct EvolveOptions {
    EvolveMethod method = EvolveMethod::Auto;
    double rel_tol = 1e-10;  // adaptive path only
    double abs_tol = 1e-12;
};

struct AmplitudeTrajectory {
    std::vector<double> times;
    Eigen::MatrixXcd amplitudes;    // (time, qubit)
    Eigen::MatrixXd probabilities;  // |amplitude|^2
    Eigen::VectorXd p_photon;       // 1 - sum_n probability
    double gamma = 1.0;

    int n_qubits() const { return static_cast<int>(amplitudes.cols()); }
    int n_times() const { return static_cast<int>(amplitudes.rows()); }
};

// times must start at 0 and increase strictly; initial must be unit norm.
// Auto tries the modal path and falls back to the adaptive path if the
// eigenbasis is numerically defective.
AmplitudeTrajectory evolve(const EffectiveMatrix& matrix,
                           const Eigen::VectorXcd& initial,
                           const std::vector<double>& times,
                           const EvolveOptions& options = {});

// Uniform grid 0..t_max inclusive with `samples` points (samples >= 2).
std::vector<double> uniform_time_grid(double t_max, int samples);

// 1 - sum_n |beta_n|^2 at each stored time.
Eigen::VectorXd photon_emission_probability(const AmplitudeTrajectory& trajectory);

enum class ResonantParity { Even, Odd };  // kd = 2 pi n vs kd = (2n+1) pi

struct ResonantState {
    Eigen::VectorXcd amplitudes;
    double p_photon = 0.0;
};

// Closed-form amplitudes for a single qubit excited_index initially excited,
// at resonant spacing. All amplitudes are real; only the 1/N-weighted
// exp(-N gamma t / 2) transient decays, leaving the trapped component.
ResonantState analytic_amplitudes_resonant(int n_qubits, int excited_index,
                                           ResonantParity parity, double t,
                                           double gamma = 1.0);

struct PlateauInterval {
    double t_start = 0.0;
    double t_end = 0.0;
    double width() const { return t_end - t_start; }
};

struct PlateauScan {
    std::vector<PlateauInterval> interior;       // flat stretches before the end
    std::optional<PlateauInterval> saturation;   // flat stretch touching t_max
};

// Flags maximal runs where |d p_photon / dt| < eps (centered differences,
// one-sided at the ends) lasting at least min_width. Requires the grid to
// resolve min_width with at least 3 points.
PlateauScan find_plateaus(const std::vector<double>& times,
                          const Eigen::VectorXd& p_photon, double eps,
                          double min_width);

}  // namespace qchain
