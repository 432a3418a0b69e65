#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "qchsh/rng.hpp"
#include "qchsh/types.hpp"

namespace qchsh {

// Dense complex matrix, row-major. Sized for small multipartite Hilbert
// spaces (products of qubit/qutrit factors); arithmetic routes through the
// kernel layer so the SIMD variants cover every hot path.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, cplx{0.0, 0.0}) {}
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  cplx trace() const;

  double frobenius_norm() const;
  double max_abs() const;

  bool is_hermitian(double tol = kDefaultTol) const;
  bool approx_equal(const ComplexMatrix& other, double tol = kDefaultTol) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx alpha);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> a_;
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx alpha, const ComplexMatrix& a);

// |v><w| for column vectors given as flat amplitude arrays.
ComplexMatrix outer(const std::vector<cplx>& v, const std::vector<cplx>& w);
std::vector<cplx> matvec(const ComplexMatrix& m, const std::vector<cplx>& v);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<cplx> tensor_product(const std::vector<cplx>& a, const std::vector<cplx>& b);

// Partial trace of a square matrix over the subsystems NOT listed in `keep`.
// `dims` are the factor dimensions in tensor order; `keep` must be strictly
// increasing and non-empty. Kept factors stay in their original order.
ComplexMatrix ptrace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                     const std::vector<std::size_t>& keep);

// Reorders tensor factors: the factor at old position perm[i] moves to new
// position i, so the output dimensions are dims[perm[0]], dims[perm[1]], ...
// perm must be a permutation of 0..dims.size()-1.
ComplexMatrix permute_subsystems(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm);

// I_pre (x) op (x) I_post where op acts on factor `target`; op may be
// rectangular (out_dim x in_dim), dims[target] must equal its column count.
ComplexMatrix lift_to_subsystem(const ComplexMatrix& op, const std::vector<std::size_t>& dims,
                                std::size_t target);

struct EigResult {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column i pairs with values[i]
};

// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
// Throws contract_error when the input is not Hermitian within tol.
EigResult hermitian_eig(const ComplexMatrix& m, double tol = kDefaultTol);

const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
// sigma[1..3]; index 0 is the identity.
const ComplexMatrix& pauli(std::size_t i);

// Basis column vector |i> in dimension dim.
std::vector<cplx> basis_ket(std::size_t dim, std::size_t i);

// Normalized pure state on a tensor product of factors.
class PureState {
 public:
  PureState(std::vector<std::size_t> dims, std::vector<cplx> amplitudes,
            double tol = kDefaultTol);

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::size_t total_dim() const { return amps_.size(); }
  ComplexMatrix projector() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<cplx> amps_;
};

// Density matrix on a tensor product of factors: Hermitian, unit trace,
// eigenvalues >= -tol. The checked constructor enforces all three.
class DensityMatrix {
 public:
  DensityMatrix(std::vector<std::size_t> dims, ComplexMatrix m, double tol = kDefaultTol);

  // Skips validation; for internal paths that construct states by provably
  // trace-preserving positive maps. Callers own the invariants.
  static DensityMatrix trusted(std::vector<std::size_t> dims, ComplexMatrix m);

  static DensityMatrix from_pure(const PureState& psi);

  const std::vector<std::size_t>& dims() const { return dims_; }
  const ComplexMatrix& matrix() const { return m_; }
  std::size_t total_dim() const { return m_.rows(); }

 private:
  DensityMatrix() = default;
  std::vector<std::size_t> dims_;
  ComplexMatrix m_;
};

// Partial trace over the subsystems not listed in `keep` (validated result).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep);

// Haar-random pure state (normalized complex-Gaussian amplitudes).
PureState random_pure_state(const std::vector<std::size_t>& dims, Rng& rng);

// Mixed state induced by tracing half of a Haar-random pure state on dim^2.
DensityMatrix random_density_matrix(const std::vector<std::size_t>& dims, Rng& rng);

// Haar-random unitary: Ginibre matrix orthonormalized by modified
// Gram-Schmidt (positive diagonal R).
ComplexMatrix random_unitary(std::size_t n, Rng& rng);

// Bloch components v_i = Re tr(rho sigma_i) of a qubit operator.
std::array<double, 3> bloch_vector(const ComplexMatrix& rho);
// (I + v.sigma)/2.
ComplexMatrix qubit_from_bloch(const std::array<double, 3>& v);

std::size_t product_dim(const std::vector<std::size_t>& dims);

}  // namespace qchsh
