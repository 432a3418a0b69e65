#pragma once

#include <complex>
#include <stdexcept>

namespace qchsh {

using cplx = std::complex<double>;

// Absolute tolerance for structural checks (hermiticity, trace normalization,
// Kraus completeness). Operations that take a tolerance default to this.
inline constexpr double kDefaultTol = 1e-10;

// Tolerance for eigendecomposition reconstruction residuals.
inline constexpr double kEigResidualTol = 1e-8;

// Eigenvalue floor when testing positive semidefiniteness of Choi matrices.
inline constexpr double kChoiEigFloor = -1e-8;

// Operands disagree on shape, or a subsystem index is out of range.
struct dimension_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric parameter lies outside its admissible range.
struct parameter_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An input violates a documented precondition (non-Hermitian matrix handed to
// the eigensolver, non-unital channel handed to a unital-only criterion, ...).
struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation produced numerically inconsistent output (e.g. an expectation
// value that should be real carries a large imaginary residue).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qchsh
