#include "qchain/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace qchain {

void ChainConfig::validate() const {
    if (n_qubits < 1) {
        throw std::invalid_argument("chain: n_qubits must be >= 1");
    }
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("chain: gamma must be > 0");
    }
    if (!positions.empty()) {
        if (static_cast<int>(positions.size()) != n_qubits) {
            throw std::invalid_argument("chain: positions must have length n_qubits");
        }
        for (std::size_t i = 1; i < positions.size(); ++i) {
            if (!(positions[i] > positions[i - 1])) {
                throw std::invalid_argument("chain: positions must be strictly increasing");
            }
        }
    }
    if (initial_amplitudes.size() > 0) {
        if (initial_amplitudes.size() != n_qubits) {
            throw std::invalid_argument("chain: initial amplitude vector must have length n_qubits");
        }
        if (std::abs(initial_amplitudes.norm() - 1.0) > 1e-12) {
            throw std::invalid_argument("chain: initial amplitude vector must have unit norm (within 1e-12)");
        }
    } else if (excited_index < 1 || excited_index > n_qubits) {
        throw std::invalid_argument("chain: excited_index out of range");
    }
}

std::vector<double> ChainConfig::resolved_positions() const {
    if (!positions.empty()) {
        return positions;
    }
    std::vector<double> phases(static_cast<std::size_t>(n_qubits));
    for (int n = 0; n < n_qubits; ++n) {
        phases[static_cast<std::size_t>(n)] = static_cast<double>(n) * kd;
    }
    return phases;
}

Eigen::VectorXcd ChainConfig::initial_state() const {
    if (initial_amplitudes.size() > 0) {
        return initial_amplitudes;
    }
    Eigen::VectorXcd beta0 = Eigen::VectorXcd::Zero(n_qubits);
    beta0[excited_index - 1] = 1.0;
    return beta0;
}

EffectiveMatrix build_effective_matrix(const ChainConfig& config) {
    config.validate();
    const int n = config.n_qubits;
    const std::vector<double> phi = config.resolved_positions();

    EffectiveMatrix out;
    out.gamma = config.gamma;
    out.m.resize(n, n);
    for (int row = 0; row < n; ++row) {
        out.m(row, row) = std::complex<double>(-config.gamma / 2.0, 0.0);
        for (int col = row + 1; col < n; ++col) {
            const double phase = std::abs(phi[static_cast<std::size_t>(col)] -
                                          phi[static_cast<std::size_t>(row)]);
            const std::complex<double> entry = -std::polar(config.gamma / 2.0, phase);
            out.m(row, col) = entry;
            out.m(col, row) = entry;  // complex symmetric by construction
        }
    }
    return out;
}

RateMatrices coherent_dissipative_rates(const ChainConfig& config) {
    config.validate();
    const int n = config.n_qubits;
    const std::vector<double> phi = config.resolved_positions();

    RateMatrices out;
    out.coherent.setZero(n, n);
    out.dissipative.resize(n, n);
    for (int row = 0; row < n; ++row) {
        out.dissipative(row, row) = config.gamma;
        for (int col = row + 1; col < n; ++col) {
            const double phase = std::abs(phi[static_cast<std::size_t>(col)] -
                                          phi[static_cast<std::size_t>(row)]);
            const double j = config.gamma * std::sin(phase) / 2.0;
            const double g = config.gamma * std::cos(phase);
            out.coherent(row, col) = j;
            out.coherent(col, row) = j;
            out.dissipative(row, col) = g;
            out.dissipative(col, row) = g;
        }
    }
    return out;
}

}  // namespace qchain
