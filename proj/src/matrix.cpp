#include "qchsh/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "qchsh/kernels.hpp"

namespace qchsh {

namespace {

inline void require(bool ok, const char* kind, const char* msg) {
  if (ok) return;
  if (kind[0] == 'd') throw dimension_error(msg);
  throw contract_error(msg);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "dim", "ragged initializer for ComplexMatrix");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) {
  return ComplexMatrix(rows, cols);
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = std::conj(a_[i]);
  return m;
}

cplx ComplexMatrix::trace() const {
  require(is_square(), "dim", "trace of non-square matrix");
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double s = 0.0;
  for (const cplx& z : a_) s = std::max(s, std::abs(z));
  return s;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (!is_square()) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
  return true;
}

bool ComplexMatrix::approx_equal(const ComplexMatrix& other, double tol) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  for (std::size_t i = 0; i < a_.size(); ++i)
    if (std::abs(a_[i] - other.a_[i]) > tol) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "dim", "shape mismatch in +=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "dim", "shape mismatch in -=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx alpha) {
  kern::scale(a_.data(), alpha, a_.data(), a_.size());
  return *this;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix m = a;
  m += b;
  return m;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix m = a;
  m -= b;
  return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), "dim", "shape mismatch in matrix product");
  ComplexMatrix c(a.rows(), b.cols());
  kern::matmul(c.data(), a.data(), b.data(), a.rows(), a.cols(), b.cols());
  return c;
}

ComplexMatrix operator*(cplx alpha, const ComplexMatrix& a) {
  ComplexMatrix m = a;
  m *= alpha;
  return m;
}

ComplexMatrix outer(const std::vector<cplx>& v, const std::vector<cplx>& w) {
  ComplexMatrix m(v.size(), w.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < w.size(); ++c) m(r, c) = v[r] * std::conj(w[c]);
  return m;
}

std::vector<cplx> matvec(const ComplexMatrix& m, const std::vector<cplx>& v) {
  require(m.cols() == v.size(), "dim", "shape mismatch in matvec");
  std::vector<cplx> out(m.rows(), cplx{0.0, 0.0});
  kern::matmul(out.data(), m.data(), v.data(), m.rows(), m.cols(), 1);
  return out;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar) {
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx f = a(ar, ac);
      if (f == cplx{0.0, 0.0}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br) {
        cplx* dst = m.data() + (ar * b.rows() + br) * m.cols() + ac * b.cols();
        kern::scale(dst, f, b.data() + br * b.cols(), b.cols());
      }
    }
  }
  return m;
}

std::vector<cplx> tensor_product(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    kern::scale(out.data() + i * b.size(), a[i], b.data(), b.size());
  return out;
}

std::size_t product_dim(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace {

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

void check_dims_match(const ComplexMatrix& m, const std::vector<std::size_t>& dims) {
  require(m.is_square(), "dim", "subsystem operation on non-square matrix");
  require(!dims.empty() && product_dim(dims) == m.rows(), "dim",
          "subsystem dimensions do not factor the matrix size");
}

}  // namespace

ComplexMatrix ptrace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                     const std::vector<std::size_t>& keep) {
  check_dims_match(m, dims);
  require(!keep.empty(), "dim", "ptrace must keep at least one subsystem");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require(keep[i] < dims.size(), "dim", "ptrace keep index out of range");
    require(i == 0 || keep[i] > keep[i - 1], "dim", "ptrace keep indices must increase");
  }
  std::vector<std::size_t> traced;
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);

  const auto strides = strides_of(dims);
  std::vector<std::size_t> keep_dims, traced_dims;
  for (auto i : keep) keep_dims.push_back(dims[i]);
  for (auto i : traced) traced_dims.push_back(dims[i]);
  const std::size_t dk = product_dim(keep_dims);
  const std::size_t dt = traced.empty() ? 1 : product_dim(traced_dims);

  // Offsets of each kept/traced multi-index into the full flat index.
  std::vector<std::size_t> keep_off(dk, 0), traced_off(dt, 0);
  for (std::size_t x = 0; x < dk; ++x) {
    std::size_t rem = x;
    for (std::size_t i = keep.size(); i-- > 0;) {
      keep_off[x] += (rem % keep_dims[i]) * strides[keep[i]];
      rem /= keep_dims[i];
    }
  }
  for (std::size_t x = 0; x < dt; ++x) {
    std::size_t rem = x;
    for (std::size_t i = traced.size(); i-- > 0;) {
      traced_off[x] += (rem % traced_dims[i]) * strides[traced[i]];
      rem /= traced_dims[i];
    }
  }

  ComplexMatrix out(dk, dk);
  for (std::size_t r = 0; r < dk; ++r) {
    for (std::size_t c = 0; c < dk; ++c) {
      cplx sum{0.0, 0.0};
      for (std::size_t t = 0; t < dt; ++t)
        sum += m(keep_off[r] + traced_off[t], keep_off[c] + traced_off[t]);
      out(r, c) = sum;
    }
  }
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm) {
  check_dims_match(m, dims);
  require(perm.size() == dims.size(), "dim", "permutation length mismatch");
  std::vector<bool> seen(dims.size(), false);
  for (auto p : perm) {
    require(p < dims.size() && !seen[p], "dim", "invalid subsystem permutation");
    seen[p] = true;
  }

  const auto old_strides = strides_of(dims);
  std::vector<std::size_t> new_dims(dims.size());
  for (std::size_t i = 0; i < perm.size(); ++i) new_dims[i] = dims[perm[i]];

  const std::size_t d = m.rows();
  std::vector<std::size_t> to_old(d, 0);
  for (std::size_t x = 0; x < d; ++x) {
    std::size_t rem = x;
    for (std::size_t i = new_dims.size(); i-- > 0;) {
      to_old[x] += (rem % new_dims[i]) * old_strides[perm[i]];
      rem /= new_dims[i];
    }
  }

  ComplexMatrix out(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(r, c) = m(to_old[r], to_old[c]);
  return out;
}

ComplexMatrix lift_to_subsystem(const ComplexMatrix& op, const std::vector<std::size_t>& dims,
                                std::size_t target) {
  require(target < dims.size(), "dim", "lift target out of range");
  require(op.cols() == dims[target], "dim", "lifted operator does not match target dimension");
  std::size_t pre = 1, post = 1;
  for (std::size_t i = 0; i < target; ++i) pre *= dims[i];
  for (std::size_t i = target + 1; i < dims.size(); ++i) post *= dims[i];
  return tensor_product(tensor_product(ComplexMatrix::identity(pre), op),
                        ComplexMatrix::identity(post));
}

// --- cyclic Jacobi eigensolver ------------------------------------------

EigResult hermitian_eig(const ComplexMatrix& m, double tol) {
  require(m.is_square(), "dim", "hermitian_eig requires a square matrix");
  if (!m.is_hermitian(tol)) throw contract_error("hermitian_eig: input is not Hermitian");

  const std::size_t n = m.rows();
  // Symmetrize away rounding noise so rotations see an exactly Hermitian A.
  ComplexMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      a(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(1.0, a.frobenius_norm());
  const double stop = 1e-14 * scale;
  const int max_sweeps = 60;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    off = std::sqrt(2.0 * off);
    if (off <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double beta = std::abs(apq);
        if (beta <= 1e-300) continue;
        const cplx phase = apq / beta;
        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        const double tau = (gamma - alpha) / (2.0 * beta);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A <- G^H A G with G = I except G(p,p)=c, G(p,q)=s*phase,
        // G(q,p)=-s*conj(phase), G(q,q)=c. Columns first, then rows.
        for (std::size_t i = 0; i < n; ++i) {
          const cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * std::conj(phase) * aiq;
          a(i, q) = s * phase * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const cplx apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - s * phase * aqj;
          a(q, j) = s * std::conj(phase) * apj + c * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (std::size_t i = 0; i < n; ++i) {
          const cplx vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * std::conj(phase) * viq;
          v(i, q) = s * phase * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

  EigResult res;
  res.values.resize(n);
  res.vectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    res.values[j] = diag[idx[j]];
    for (std::size_t i = 0; i < n; ++i) res.vectors(i, j) = v(i, idx[j]);
  }
  return res;
}

// --- Pauli and basis helpers ---------------------------------------------

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m{{0.0, 1.0}, {1.0, 0.0}};
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}};
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m{{1.0, 0.0}, {0.0, -1.0}};
  return m;
}

const ComplexMatrix& pauli(std::size_t i) {
  static const ComplexMatrix id2 = ComplexMatrix::identity(2);
  switch (i) {
    case 0:
      return id2;
    case 1:
      return pauli_x();
    case 2:
      return pauli_y();
    case 3:
      return pauli_z();
    default:
      throw parameter_error("pauli index must be 0..3");
  }
}

std::vector<cplx> basis_ket(std::size_t dim, std::size_t i) {
  if (i >= dim) throw dimension_error("basis_ket index out of range");
  std::vector<cplx> v(dim, cplx{0.0, 0.0});
  v[i] = 1.0;
  return v;
}

// --- states ----------------------------------------------------------------

PureState::PureState(std::vector<std::size_t> dims, std::vector<cplx> amplitudes, double tol)
    : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
  require(product_dim(dims_) == amps_.size(), "dim",
          "pure state amplitude count does not match dimensions");
  double n2 = 0.0;
  for (const cplx& z : amps_) n2 += std::norm(z);
  if (std::abs(n2 - 1.0) > std::max(tol, 1e-9))
    throw contract_error("pure state is not normalized");
}

ComplexMatrix PureState::projector() const { return outer(amps_, amps_); }

DensityMatrix::DensityMatrix(std::vector<std::size_t> dims, ComplexMatrix m, double tol) {
  require(m.is_square() && product_dim(dims) == m.rows(), "dim",
          "density matrix shape does not match dimensions");
  if (!m.is_hermitian(tol)) throw contract_error("density matrix is not Hermitian");
  if (std::abs(m.trace() - cplx{1.0, 0.0}) > std::max(tol, 1e-9))
    throw contract_error("density matrix trace is not 1");
  const EigResult eig = hermitian_eig(m, std::max(tol, 1e-9));
  if (eig.values.back() < -std::max(tol, 1e-9))
    throw contract_error("density matrix has a negative eigenvalue");
  dims_ = std::move(dims);
  m_ = std::move(m);
}

DensityMatrix DensityMatrix::trusted(std::vector<std::size_t> dims, ComplexMatrix m) {
  require(m.is_square() && product_dim(dims) == m.rows(), "dim",
          "density matrix shape does not match dimensions");
  DensityMatrix rho;
  rho.dims_ = std::move(dims);
  rho.m_ = std::move(m);
  return rho;
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return trusted(psi.dims(), psi.projector());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep) {
  ComplexMatrix m = ptrace(rho.matrix(), rho.dims(), keep);
  std::vector<std::size_t> kept_dims;
  for (auto i : keep) kept_dims.push_back(rho.dims()[i]);
  return DensityMatrix::trusted(std::move(kept_dims), std::move(m));
}

PureState random_pure_state(const std::vector<std::size_t>& dims, Rng& rng) {
  const std::size_t d = product_dim(dims);
  std::vector<cplx> v(d);
  double n2 = 0.0;
  do {
    for (auto& z : v) z = rng.complex_gaussian();
    n2 = 0.0;
    for (const cplx& z : v) n2 += std::norm(z);
  } while (n2 < 1e-12);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& z : v) z *= inv;
  return PureState(dims, std::move(v));
}

DensityMatrix random_density_matrix(const std::vector<std::size_t>& dims, Rng& rng) {
  const std::size_t d = product_dim(dims);
  const PureState psi = random_pure_state({d, d}, rng);
  ComplexMatrix m = ptrace(psi.projector(), {d, d}, {0});
  return DensityMatrix::trusted(dims, std::move(m));
}

ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
  ComplexMatrix g(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) g(r, c) = rng.complex_gaussian();

  // Modified Gram-Schmidt over columns.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      cplx proj{0.0, 0.0};
      for (std::size_t r = 0; r < n; ++r) proj += std::conj(g(r, i)) * g(r, j);
      for (std::size_t r = 0; r < n; ++r) g(r, j) -= proj * g(r, i);
    }
    double n2 = 0.0;
    for (std::size_t r = 0; r < n; ++r) n2 += std::norm(g(r, j));
    while (n2 < 1e-20) {  // essentially never: resample a degenerate column
      for (std::size_t r = 0; r < n; ++r) g(r, j) = rng.complex_gaussian();
      for (std::size_t i = 0; i < j; ++i) {
        cplx proj{0.0, 0.0};
        for (std::size_t r = 0; r < n; ++r) proj += std::conj(g(r, i)) * g(r, j);
        for (std::size_t r = 0; r < n; ++r) g(r, j) -= proj * g(r, i);
      }
      n2 = 0.0;
      for (std::size_t r = 0; r < n; ++r) n2 += std::norm(g(r, j));
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t r = 0; r < n; ++r) g(r, j) *= inv;
  }
  return g;
}

std::array<double, 3> bloch_vector(const ComplexMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw dimension_error("bloch_vector needs a 2x2 matrix");
  std::array<double, 3> v{};
  for (std::size_t i = 1; i <= 3; ++i) v[i - 1] = (pauli(i) * rho).trace().real();
  return v;
}

ComplexMatrix qubit_from_bloch(const std::array<double, 3>& v) {
  ComplexMatrix m = ComplexMatrix::identity(2);
  for (std::size_t i = 1; i <= 3; ++i) m += cplx{v[i - 1], 0.0} * pauli(i);
  m *= cplx{0.5, 0.0};
  return m;
}

}  // namespace qchsh
