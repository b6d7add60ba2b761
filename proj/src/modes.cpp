#include "qchain/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qchain {

const char* to_string(ModeClass c) {
    switch (c) {
        case ModeClass::Dark: return "dark";
        case ModeClass::Subradiant: return "subradiant";
        case ModeClass::Superradiant: return "superradiant";
    }
    return "unknown";
}

Eigen::VectorXd ModeSet::decay_rates() const {
    return -2.0 * roots.real();
}

double ModeSet::min_decay_rate() const {
    if (roots.size() == 0) throw std::invalid_argument("empty mode set");
    return decay_rates().minCoeff();
}

ModeClass ModeSet::classify(int i, double dark_tol) const {
    if (i < 0 || i >= size()) throw std::invalid_argument("mode index out of range");
    if (dark_tol < 0.0) dark_tol = default_dark_tol();
    const double rate = decay_rate(i);
    if (rate < dark_tol) return ModeClass::Dark;
    // Rates within rounding error of gamma sit on the boundary and count as
    // superradiant, so analytically-equal rates classify consistently.
    if (rate < gamma * (1.0 - 1e-12)) return ModeClass::Subradiant;
    return ModeClass::Superradiant;
}

std::vector<ModeClass> ModeSet::classification(double dark_tol) const {
    std::vector<ModeClass> out(static_cast<size_t>(size()));
    for (int i = 0; i < size(); ++i) out[static_cast<size_t>(i)] = classify(i, dark_tol);
    return out;
}

ModeSet characteristic_roots(const EffectiveMatrix& matrix) {
    const int n = matrix.order();
    if (n < 1) throw std::invalid_argument("empty matrix");

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(matrix.m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw SolverError("eigensolver failed to converge");
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXcd& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals[a].real() != vals[b].real()) return vals[a].real() < vals[b].real();
        return vals[a].imag() < vals[b].imag();
    });

    ModeSet set;
    set.gamma = matrix.gamma;
    set.roots.resize(n);
    set.eigenvectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
        set.roots[i] = vals[order[static_cast<size_t>(i)]];
        Eigen::VectorXcd v = solver.eigenvectors().col(order[static_cast<size_t>(i)]);
        // Fix the arbitrary phase: the first component whose magnitude ties
        // the maximum (within rounding) becomes real positive. The tolerance
        // keeps the pivot choice stable for mirror-symmetric vectors whose
        // entries agree in magnitude.
        const double vmax = v.cwiseAbs().maxCoeff();
        int pivot_index = 0;
        for (int k = 0; k < n; ++k) {
            if (std::abs(v[k]) >= vmax * (1.0 - 1e-12)) {
                pivot_index = k;
                break;
            }
        }
        const std::complex<double> pivot = v[pivot_index];
        if (std::abs(pivot) > 0.0) v *= std::abs(pivot) / pivot;
        set.eigenvectors.col(i) = v / v.norm();
    }
    return set;
}

int dark_state_count(const ModeSet& modes, double tol) {
    if (tol < 0.0) tol = modes.default_dark_tol();
    int count = 0;
    for (int i = 0; i < modes.size(); ++i) {
        if (modes.decay_rate(i) < tol) ++count;
    }
    return count;
}

Eigen::VectorXcd ModalExpansion::reconstruct(double t) const {
    const int n = static_cast<int>(coefficients.cols());
    Eigen::VectorXcd beta = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < roots.size(); ++j) {
        beta += std::exp(roots[j] * t) * coefficients.row(j).transpose();
    }
    return beta;
}

Eigen::VectorXd ModalExpansion::mode_weights() const {
    return coefficients.cwiseAbs().rowwise().maxCoeff();
}

ModalExpansion modal_expansion(const ModeSet& modes, const Eigen::VectorXcd& initial) {
    const int n = modes.size();
    if (initial.size() != n) {
        throw std::invalid_argument("initial vector size does not match mode count");
    }

    const Eigen::MatrixXcd& v = modes.eigenvectors;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin >= 1e10) {
        throw DefectiveEigenbasisError(
            "eigenvector basis is numerically defective (condition number >= 1e10)");
    }

    Eigen::VectorXcd c = v.colPivHouseholderQr().solve(initial);

    ModalExpansion expansion;
    expansion.roots = modes.roots;
    expansion.coefficients.resize(n, n);
    for (int j = 0; j < n; ++j) {
        expansion.coefficients.row(j) = (c[j] * v.col(j)).transpose();
    }
    return expansion;
}

Eigen::VectorXcd CollectiveStateSet::reconstruct(double t) const {
    Eigen::VectorXcd beta = Eigen::VectorXcd::Zero(states.rows());
    for (int i = 0; i < roots.size(); ++i) {
        beta += amplitudes[i] * std::exp(roots[i] * t) * states.col(i);
    }
    return beta;
}

CollectiveStateSet collective_state_decomposition(const ModeSet& modes,
                                                  const Eigen::VectorXcd& initial) {
    const int n = modes.size();
    if (initial.size() != n) {
        throw std::invalid_argument("initial vector size does not match mode count");
    }

    const double sep_tol = 1e-8 * modes.gamma;
    const double dark_tol = modes.default_dark_tol();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(modes.roots[i] - modes.roots[j]) <= sep_tol) {
                const bool dark = modes.decay_rate(i) < dark_tol && modes.decay_rate(j) < dark_tol;
                throw DegenerateSpectrumError(
                    dark ? "degenerate dark subspace: bi-orthogonal normalization is undefined"
                         : "degenerate spectrum: bi-orthogonal normalization is undefined");
            }
        }
    }

    CollectiveStateSet set;
    set.roots = modes.roots;
    set.states.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXcd& v = modes.eigenvectors.col(i);
        // Unconjugated bilinear normalization sum_n (alpha_n)^2 = 1.
        const std::complex<double> q = (v.transpose() * v)(0, 0);
        if (std::abs(q) < 1e-12) {
            throw DegenerateSpectrumError(
                "quasi-null eigenvector: bi-orthogonal normalization is undefined");
        }
        set.states.col(i) = v / std::sqrt(q);
    }
    set.amplitudes = set.states.colPivHouseholderQr().solve(initial);
    return set;
}

std::array<std::complex<double>, 3> reduced_central_cubic_roots(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    // lambda^3 + 1.5 lambda^2 + 0.5 lambda + 0.5 = 0 in units of gamma,
    // solved via the companion matrix.
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(0, 2) = -0.5;
    companion(1, 2) = -0.5;
    companion(2, 2) = -1.5;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw SolverError("companion eigensolver failed to converge");
    }
    std::array<std::complex<double>, 3> roots;
    for (int i = 0; i < 3; ++i) roots[static_cast<size_t>(i)] = solver.eigenvalues()[i];
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    for (auto& r : roots) r *= gamma;
    return roots;
}

}  // namespace qchain
