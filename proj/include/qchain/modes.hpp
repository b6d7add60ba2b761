// modes.hpp — characteristic roots and collective-state structure.
//
// The amplitude evolution d(beta)/dt = M beta is diagonalized into N
// characteristic roots lambda_i with complex energies Ebar_i = i lambda_i,
// mode detunings E_i = -Im lambda_i and decay rates Gamma_i = -2 Re lambda_i.
// Because M is complex symmetric, the right eigenvectors form a bi-orthogonal
// set under the unconjugated bilinear form sum_n v_n w_n.

#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qchain/chain.hpp"
#include "qchain/errors.hpp"

namespace qchain {

enum class ModeClass { Dark, Subradiant, Superradiant };

const char* to_string(ModeClass c);

struct ModeSet {
    Eigen::VectorXcd roots;         // sorted by ascending Re, then ascending Im
    Eigen::MatrixXcd eigenvectors;  // column i pairs with roots[i]; unit 2-norm
    double gamma = 1.0;             // single-qubit rate, for classification

    int size() const { return static_cast<int>(roots.size()); }

    std::complex<double> complex_energy(int i) const {
        return std::complex<double>(0.0, 1.0) * roots[i];
    }
    double detuning(int i) const { return -roots[i].imag(); }      // E_i
    double decay_rate(int i) const { return -2.0 * roots[i].real(); }  // Gamma_i

    Eigen::VectorXd decay_rates() const;
    double min_decay_rate() const;

    double default_dark_tol() const { return 1e-8 * gamma; }

    // dark: Gamma_i < dark_tol; subradiant: Gamma_i < gamma;
    // superradiant: Gamma_i >= gamma (a mode decaying exactly at the
    // single-qubit rate counts as the top of the ordering, with a 1e-12
    // relative band absorbing rounding error at the boundary).
    ModeClass classify(int i, double dark_tol = -1.0) const;
    std::vector<ModeClass> classification(double dark_tol = -1.0) const;
};

// Dense eigensolve of M. Throws SolverError if the solver fails to converge.
ModeSet characteristic_roots(const EffectiveMatrix& matrix);

// Number of modes with Gamma_i < tol; tol < 0 selects the default 1e-8 gamma.
int dark_state_count(const ModeSet& modes, double tol = -1.0);

// Coefficients of beta_n(t) = sum_j b_j^(n) exp(lambda_j t) for a given
// initial vector. coefficients(j, n) = b_j^(n).
struct ModalExpansion {
    Eigen::MatrixXcd coefficients;  // (mode j, qubit n)
    Eigen::VectorXcd roots;

    Eigen::VectorXcd reconstruct(double t) const;

    // max_n |b_j^(n)| per mode; zero weight means the mode is not excited.
    Eigen::VectorXd mode_weights() const;
};

// Throws DefectiveEigenbasisError when the eigenvector matrix has condition
// number >= 1e10 (numerically defective eigenproblem).
ModalExpansion modal_expansion(const ModeSet& modes, const Eigen::VectorXcd& initial);

// Bi-orthogonal collective states alpha^(i) with sum_n (alpha_n^(i))^2 = 1
// and the decomposition amplitudes A_i solving sum_i A_i alpha_n^(i) = beta_n(0).
struct CollectiveStateSet {
    Eigen::MatrixXcd states;       // column i = alpha^(i)
    Eigen::VectorXcd amplitudes;   // A_i
    Eigen::VectorXcd roots;

    // beta_n(t) = sum_i A_i alpha_n^(i) exp(lambda_i t)
    Eigen::VectorXcd reconstruct(double t) const;
};

// Requires a simple spectrum (pairwise root separation > 1e-8 gamma);
// throws DegenerateSpectrumError otherwise, e.g. for kd = n pi with N >= 3
// where the dark subspace is degenerate.
CollectiveStateSet collective_state_decomposition(const ModeSet& modes,
                                                  const Eigen::VectorXcd& initial);

// Roots of lambda (lambda + gamma) (lambda + gamma/2) + gamma^3/2 = 0,
// the reduced characteristic equation of the five-qubit chain at
// kd = pi/2 with the central qubit excited. Sorted ascending (Re, Im).
std::array<std::complex<double>, 3> reduced_central_cubic_roots(double gamma = 1.0);

}  // namespace qchain
