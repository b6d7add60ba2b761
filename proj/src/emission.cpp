#include "qchain/emission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qchain {
namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// f'(x_0) from five equally spaced samples starting at x_0, O(h^4).
std::complex<double> forward_derivative5(const Eigen::VectorXcd& f, int start, int stride,
                                         double h) {
    const auto at = [&](int k) { return f[start + k * stride]; };
    return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) /
           (12.0 * h * static_cast<double>(stride));
}

bool uniform_grid(const std::vector<double>& times, int last, double* step) {
    const double h = times[1] - times[0];
    for (int i = 1; i <= last; ++i) {
        if (std::abs((times[static_cast<size_t>(i)] - times[static_cast<size_t>(i - 1)]) - h) >
            1e-9 * std::max(1.0, h)) {
            return false;
        }
    }
    *step = h;
    return true;
}

// Linear interpolation of the half-height crossing between samples i and i+1.
double crossing(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, int i, double level) {
    const double frac = (level - ys[i]) / (ys[i + 1] - ys[i]);
    return xs[i] + frac * (xs[i + 1] - xs[i]);
}

}  // namespace

double required_time_step(double max_abs_detuning, int n_qubits, double gamma) {
    if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    return 0.01 / std::max(std::abs(max_abs_detuning), static_cast<double>(n_qubits) * gamma);
}

Eigen::VectorXcd photon_amplitude_numeric(const AmplitudeTrajectory& trajectory,
                                          const std::vector<double>& positions,
                                          const Eigen::VectorXd& detunings, double t) {
    const int n = trajectory.n_qubits();
    if (static_cast<int>(positions.size()) != n) {
        throw std::invalid_argument("positions size does not match trajectory");
    }
    if (t < 0.0) throw std::invalid_argument("observation time must be non-negative");
    if (t == 0.0) return Eigen::VectorXcd::Zero(detunings.size());

    // Locate t on the stored grid.
    const std::vector<double>& times = trajectory.times;
    const double t_tol = 1e-9 * std::max(1.0, t);
    const auto it = std::lower_bound(times.begin(), times.end(), t - t_tol);
    if (it == times.end() || std::abs(*it - t) > t_tol) {
        throw std::invalid_argument("trajectory does not contain the observation time");
    }
    const int last = static_cast<int>(it - times.begin());
    if (last < 1) throw std::invalid_argument("observation time too early for the stored grid");

    double max_abs_delta = 0.0;
    for (int d = 0; d < detunings.size(); ++d) {
        max_abs_delta = std::max(max_abs_delta, std::abs(detunings[d]));
    }
    const double max_step = required_time_step(max_abs_delta, n, trajectory.gamma);
    for (int i = 1; i <= last; ++i) {
        if (times[static_cast<size_t>(i)] - times[static_cast<size_t>(i - 1)] >
            max_step * (1.0 + 1e-9)) {
            throw std::invalid_argument("trajectory grid too coarse for the requested detunings");
        }
    }

    // Position-phase contraction: s(t') = sum_n exp(-i phi_n) beta_n(t').
    Eigen::VectorXcd phase_factors(n);
    for (int m = 0; m < n; ++m) {
        phase_factors[m] = std::exp(-kI * positions[static_cast<size_t>(m)]);
    }
    Eigen::VectorXcd s = trajectory.amplitudes.topRows(last + 1) * phase_factors;

    double h = 0.0;
    const bool uniform = uniform_grid(times, last, &h);

    Eigen::VectorXcd result(detunings.size());
    Eigen::VectorXcd f(last + 1);
    for (int d = 0; d < detunings.size(); ++d) {
        const double delta = detunings[d];
        const std::complex<double> rot = std::exp(kI * delta * h);
        std::complex<double> phase = 1.0;
        std::complex<double> acc = 0.0;
        for (int i = 0; i <= last; ++i) {
            if (uniform) {
                // Recurrence with periodic resync against accumulated drift.
                if (i % 4096 == 0) phase = std::exp(kI * delta * times[static_cast<size_t>(i)]);
                f[i] = s[i] * phase;
                phase *= rot;
            } else {
                f[i] = s[i] * std::exp(kI * delta * times[static_cast<size_t>(i)]);
            }
            double w;
            if (i == 0) {
                w = (times[1] - times[0]) / 2.0;
            } else if (i == last) {
                w = (times[static_cast<size_t>(last)] - times[static_cast<size_t>(last - 1)]) / 2.0;
            } else {
                w = (times[static_cast<size_t>(i + 1)] - times[static_cast<size_t>(i - 1)]) / 2.0;
            }
            acc += w * f[i];
        }
        if (uniform && last >= 4) {
            // Euler-Maclaurin endpoint correction: -(h^2/12) (f'(T) - f'(0)).
            const std::complex<double> d0 = forward_derivative5(f, 0, 1, h);
            const std::complex<double> dT = forward_derivative5(f, last, -1, h);
            acc -= h * h / 12.0 * (dT - d0);
        }
        result[d] = -kI * acc;
    }
    return result;
}

Eigen::VectorXcd photon_amplitude_modal(const ModalExpansion& expansion,
                                        const std::vector<double>& positions,
                                        const Eigen::VectorXd& detunings, double t) {
    const int n = static_cast<int>(expansion.coefficients.cols());
    if (static_cast<int>(positions.size()) != n) {
        throw std::invalid_argument("positions size does not match expansion");
    }
    if (t < 0.0) throw std::invalid_argument("observation time must be non-negative");

    Eigen::VectorXcd phase_factors(n);
    for (int m = 0; m < n; ++m) {
        phase_factors[m] = std::exp(-kI * positions[static_cast<size_t>(m)]);
    }
    // Per-mode weight w_j = sum_n b_j^(n) exp(-i phi_n).
    Eigen::VectorXcd weights = expansion.coefficients * phase_factors;

    Eigen::VectorXcd result = Eigen::VectorXcd::Zero(detunings.size());
    for (int d = 0; d < detunings.size(); ++d) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < expansion.roots.size(); ++j) {
            const std::complex<double> z = detunings[d] - kI * expansion.roots[j];
            const std::complex<double> zt = z * t;
            std::complex<double> term;
            if (std::abs(zt) < 1e-4) {
                // (1 - exp(i z t)) / z by series: -i t (1 + izt/2 + (izt)^2/6 + (izt)^3/24).
                const std::complex<double> izt = kI * zt;
                term = -kI * t * (1.0 + izt / 2.0 + izt * izt / 6.0 + izt * izt * izt / 24.0);
            } else {
                term = (1.0 - std::exp(kI * zt)) / z;
            }
            acc += weights[j] * term;
        }
        result[d] = acc;
    }
    return result;
}

Eigen::VectorXd lorentzian_reference(int n_qubits, const Eigen::VectorXd& detunings,
                                     double gamma) {
    if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    const double half_rate = static_cast<double>(n_qubits) * gamma / 2.0;
    return (1.0 / (detunings.array().square() + half_rate * half_rate)).matrix();
}

SpectrumResult make_spectrum(Eigen::VectorXd detunings, Eigen::VectorXcd amplitudes,
                             double observation_time, SpectrumNormalization normalization) {
    if (detunings.size() != amplitudes.size()) {
        throw std::invalid_argument("detuning and amplitude grids must match");
    }
    SpectrumResult result;
    result.detunings = std::move(detunings);
    result.amplitudes = std::move(amplitudes);
    result.values = result.amplitudes.cwiseAbs2();
    result.observation_time = observation_time;
    result.normalization = normalization;
    if (normalization == SpectrumNormalization::Peak) {
        const double peak = result.values.maxCoeff();
        if (peak > 0.0) result.values /= peak;
    }
    return result;
}

std::vector<SpectralPeak> find_spectral_peaks(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys,
                                              double min_height_fraction) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw std::invalid_argument("need matching grids with at least 3 points");
    }
    const double global_max = ys.maxCoeff();
    const double floor = min_height_fraction * global_max;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<SpectralPeak> peaks;
    for (int i = 1; i + 1 < ys.size(); ++i) {
        if (!(ys[i] > ys[i - 1] && ys[i] > ys[i + 1] && ys[i] >= floor)) continue;

        SpectralPeak peak;
        peak.position = xs[i];
        peak.height = ys[i];
        const double half = ys[i] / 2.0;

        double left = nan;
        for (int j = i - 1; j >= 0; --j) {
            if (ys[j + 1] >= half && ys[j] < half) {
                left = crossing(xs, ys, j, half);
                break;
            }
            if (ys[j] > ys[i]) break;  // climbing into a taller neighbor
        }
        double right = nan;
        for (int j = i + 1; j < ys.size(); ++j) {
            if (ys[j - 1] >= half && ys[j] < half) {
                right = crossing(xs, ys, j - 1, half);
                break;
            }
            if (ys[j] > ys[i]) break;
        }

        if (std::isnan(left) && std::isnan(right)) {
            peak.hwhm = nan;
        } else if (std::isnan(left)) {
            peak.hwhm = right - peak.position;
        } else if (std::isnan(right)) {
            peak.hwhm = peak.position - left;
        } else {
            peak.hwhm = (right - left) / 2.0;
        }
        peaks.push_back(peak);
    }
    return peaks;
}

double measure_fwhm(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw std::invalid_argument("need matching grids with at least 3 points");
    }
    int imax = 0;
    ys.maxCoeff(&imax);
    const double half = ys[imax] / 2.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    double left = nan;
    for (int j = imax - 1; j >= 0; --j) {
        if (ys[j] < half) {
            left = crossing(xs, ys, j, half);
            break;
        }
    }
    double right = nan;
    for (int j = imax + 1; j < ys.size(); ++j) {
        if (ys[j] < half) {
            right = crossing(xs, ys, j - 1, half);
            break;
        }
    }
    if (std::isnan(left) || std::isnan(right)) return nan;
    return right - left;
}

}  // namespace qchain
