// Exception types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace qchain {

inline constexpr const char* kVersion = "0.1.0";

// Numerical failure in an eigensolve or ODE integration.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Eigenvector matrix too ill-conditioned for modal propagation; callers
// should fall back to the adaptive ODE path.
struct DefectiveEigenbasisError : SolverError {
    explicit DefectiveEigenbasisError(const std::string& what) : SolverError(what) {}
};

// Repeated eigenvalues make the bi-orthogonal normalization ill-defined.
struct DegenerateSpectrumError : SolverError {
    explicit DegenerateSpectrumError(const std::string& what) : SolverError(what) {}
};

}  // namespace qchain
