#include "qchsh/chsh.hpp"

#include <algorithm>
#include <cmath>

namespace qchsh {

namespace {

// Decision tolerance for boundary comparisons of analytic criteria.
constexpr double kCriterionTol = 1e-9;

}  // namespace

DichotomicObservable::DichotomicObservable(ComplexMatrix m, double herm_tol, double square_tol)
    : m_(std::move(m)) {
  if (!m_.is_square()) throw dimension_error("observable must be square");
  if (!m_.is_hermitian(herm_tol)) throw contract_error("observable is not Hermitian");
  const ComplexMatrix sq = m_ * m_;
  if (!sq.approx_equal(ComplexMatrix::identity(m_.rows()), square_tol))
    throw contract_error("observable does not square to the identity");
}

BellOperator bell_operator(const DichotomicObservable& m1, const DichotomicObservable& m2,
                           const DichotomicObservable& n1, const DichotomicObservable& n2) {
  if (m1.dim() != m2.dim() || n1.dim() != n2.dim())
    throw dimension_error("observable pairs must share dimensions");
  BellOperator bell;
  bell.dim_a = m1.dim();
  bell.dim_b = n1.dim();
  bell.matrix = tensor_product(m1.matrix(), n1.matrix() + n2.matrix());
  bell.matrix += tensor_product(m2.matrix(), n1.matrix() - n2.matrix());
  return bell;
}

double chsh_value_raw(const ComplexMatrix& bell, const ComplexMatrix& rho) {
  if (bell.cols() != rho.rows() || !rho.is_square())
    throw dimension_error("Bell operator and state dimensions disagree");
  // tr(B rho) without forming the product matrix.
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < bell.rows(); ++i)
    for (std::size_t k = 0; k < bell.cols(); ++k) t += bell(i, k) * rho(k, i);
  if (std::abs(t.imag()) > 1e-6)
    throw numeric_error("CHSH expectation has a non-negligible imaginary part");
  return t.real();
}

double chsh_value(const BellOperator& bell, const DensityMatrix& rho) {
  if (bell.dim_a * bell.dim_b != rho.total_dim())
    throw dimension_error("Bell operator and state dimensions disagree");
  return chsh_value_raw(bell.matrix, rho.matrix());
}

CorrelationMatrix correlation_matrix(const DensityMatrix& rho) {
  if (rho.dims() != std::vector<std::size_t>{2, 2})
    throw dimension_error("correlation matrix is defined for two-qubit states");
  CorrelationMatrix t{};
  for (std::size_t i = 1; i <= 3; ++i)
    for (std::size_t j = 1; j <= 3; ++j)
      t.t[i - 1][j - 1] =
          chsh_value_raw(tensor_product(pauli(i), pauli(j)), rho.matrix());
  return t;
}

namespace {

// Eigenvalues (descending) of the 3x3 symmetric matrix T^T T.
std::array<double, 3> tt_eigenvalues(const std::array<std::array<double, 3>, 3>& t) {
  ComplexMatrix tt(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += t[k][i] * t[k][j];
      tt(i, j) = s;
    }
  const EigResult eig = hermitian_eig(tt, 1e-8);
  return {eig.values[0], eig.values[1], eig.values[2]};
}

}  // namespace

double horodecki_value(const CorrelationMatrix& t) {
  const auto ev = tt_eigenvalues(t.t);
  return 2.0 * std::sqrt(std::max(0.0, ev[0] + ev[1]));
}

double horodecki_value(const DensityMatrix& rho) {
  return horodecki_value(correlation_matrix(rho));
}

std::array<double, 3> lambda_singular_values(const AffineRep& rep) {
  const auto ev = tt_eigenvalues(rep.lambda);
  return {std::sqrt(std::max(0.0, ev[0])), std::sqrt(std::max(0.0, ev[1])),
          std::sqrt(std::max(0.0, ev[2]))};
}

bool unital_is_chsh_breaking(const AffineRep& rep) {
  for (double s : rep.shift)
    if (std::abs(s) > 1e-10)
      throw contract_error("unital CHSH-breaking criterion needs a unital map (zero shift)");
  const auto sv = lambda_singular_values(rep);
  return sv[0] * sv[0] + sv[1] * sv[1] <= 1.0 + kCriterionTol;
}

double max_chsh_unital(const KrausChannel& ch) {
  if (!is_unital(ch)) throw contract_error("max_chsh_unital requires a unital channel");
  const auto sv = lambda_singular_values(affine_rep(ch));
  return 2.0 * std::sqrt(sv[0] * sv[0] + sv[1] * sv[1]);
}

double amplitude_damping_threshold() { return 0.5; }

double loss_threshold() { return (std::sqrt(5.0) - 1.0) / 2.0; }

double erasure_threshold() { return 0.5; }

double erasure_chsh_expression(double p, double lambda) {
  if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("p must be in [0, 1]");
  if (!(lambda >= 0.5 && lambda <= 1.0)) throw parameter_error("lambda must be in [1/2, 1]");
  return 2.0 * p * std::sqrt(1.0 + 4.0 * lambda * (1.0 - lambda)) +
         (1.0 - p) * (2.0 * lambda - 1.0);
}

ErasureMax erasure_chsh_max(double p) {
  // Dense grid, then golden-section refinement around the best cell.
  const double step = 1e-4;
  double best_l = 0.5;
  double best_v = erasure_chsh_expression(p, 0.5);
  for (double l = 0.5; l <= 1.0 + 1e-12; l += step) {
    const double lc = std::min(l, 1.0);
    const double v = erasure_chsh_expression(p, lc);
    if (v > best_v) {
      best_v = v;
      best_l = lc;
    }
  }
  double lo = std::max(0.5, best_l - step);
  double hi = std::min(1.0, best_l + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = erasure_chsh_expression(p, x1), f2 = erasure_chsh_expression(p, x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = erasure_chsh_expression(p, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = erasure_chsh_expression(p, x1);
    }
  }
  const double lm = 0.5 * (lo + hi);
  const double vm = erasure_chsh_expression(p, lm);
  if (vm > best_v) return {vm, lm};
  return {best_v, best_l};
}

}  // namespace qchsh
