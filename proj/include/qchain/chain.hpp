// chain.hpp — chain geometry and the effective non-Hermitian coupling matrix.
//
// A chain of N identical qubits sits in an open waveguide. Positions are
// stored as dimensionless phases k*x_n, so the phase per spacing kd is the
// single geometry parameter of the equidistant chain. Time is measured in
// tau = 1/Gamma when gamma == 1.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qchain/errors.hpp"

namespace qchain {

struct ChainConfig {
    int n_qubits = 1;
    double gamma = 1.0;              // single-qubit decay rate, > 0
    double kd = 0.0;                 // phase per spacing, radians; used when positions empty
    std::vector<double> positions;   // phases k*x_n, strictly increasing; empty = equidistant
    int excited_index = 1;           // 1-based, qubits ordered left to right
    Eigen::VectorXcd initial_amplitudes;  // optional explicit initial state, unit norm

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;

    // Phases k*x_n; fills (n-1)*kd when no explicit positions are set.
    std::vector<double> resolved_positions() const;

    // Basis vector at excited_index, or the explicit amplitude vector.
    Eigen::VectorXcd initial_state() const;
};

// The N x N complex-symmetric matrix M with d(beta)/dt = M beta.
// Diagonal entries are exactly -gamma/2; off-diagonal entries are
// -(gamma/2) exp(i |phi_m - phi_n|).
struct EffectiveMatrix {
    Eigen::MatrixXcd m;
    double gamma = 1.0;

    int order() const { return static_cast<int>(m.rows()); }
};

EffectiveMatrix build_effective_matrix(const ChainConfig& config);

// Coherent (J) and dissipative (G) rate matrices:
//   J_mn = gamma sin(|phi_m - phi_n|) / 2,   G_mn = gamma cos(|phi_m - phi_n|).
// Off the diagonal M_nm = -(G_nm/2 + i J_nm); on it G_nn = gamma, J_nn = 0.
struct RateMatrices {
    Eigen::MatrixXd coherent;     // J
    Eigen::MatrixXd dissipative;  // G
};

RateMatrices coherent_dissipative_rates(const ChainConfig& config);

}  // namespace qchain
