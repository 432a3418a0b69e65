#pragma once

#include <array>

#include "qchsh/channels.hpp"
#include "qchsh/matrix.hpp"

namespace qchsh {

// Hermitian with spectrum in {+1, -1}: M^2 = I within tolerance.
class DichotomicObservable {
 public:
  explicit DichotomicObservable(ComplexMatrix m, double herm_tol = kDefaultTol,
                                double square_tol = kEigResidualTol);

  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

// M1 (x) (N1 + N2) + M2 (x) (N1 - N2) on the (Alexis, Bobby) bipartition.
struct BellOperator {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  ComplexMatrix matrix;
};

BellOperator bell_operator(const DichotomicObservable& m1, const DichotomicObservable& m2,
                           const DichotomicObservable& n1, const DichotomicObservable& n2);

// Re tr(B rho); throws numeric_error if the imaginary residue exceeds 1e-6.
double chsh_value(const BellOperator& bell, const DensityMatrix& rho);
double chsh_value_raw(const ComplexMatrix& bell, const ComplexMatrix& rho);

// T_ij = tr(rho sigma_i (x) sigma_j) for a two-qubit state.
struct CorrelationMatrix {
  std::array<std::array<double, 3>, 3> t;
};

CorrelationMatrix correlation_matrix(const DensityMatrix& rho);

// 2 sqrt(t1 + t2) with t1, t2 the two largest eigenvalues of T^T T: the
// maximal CHSH value of rho over projective qubit observables.
double horodecki_value(const DensityMatrix& rho);
double horodecki_value(const CorrelationMatrix& t);

// Singular values (descending) of the Bloch matrix of an affine map.
std::array<double, 3> lambda_singular_values(const AffineRep& rep);

// For a unital qubit channel with Bloch matrix singular values s1 >= s2:
// the channel output admits no CHSH violation for any input iff
// s1^2 + s2^2 <= 1. Requires rep.shift ~ 0 (contract violation otherwise).
bool unital_is_chsh_breaking(const AffineRep& rep);

// 2 sqrt(s1^2 + s2^2): the best CHSH value any input can reach through a
// unital qubit channel acting on one side of a two-qubit state.
double max_chsh_unital(const KrausChannel& ch);

// Exact CHSH-breaking thresholds (channel breaks for p <= threshold).
double amplitude_damping_threshold();
double loss_threshold();
double erasure_threshold();

// Erasure-channel CHSH expression 2p sqrt(1 + 4 l (1-l)) + (1-p)(2l - 1) for
// a Schmidt-coefficient-l pure input; lambda in [1/2, 1].
double erasure_chsh_expression(double p, double lambda);

// Maximum of the expression over lambda (dense grid + local refinement).
struct ErasureMax {
  double value;
  double lambda;
};
ErasureMax erasure_chsh_max(double p);

}  // namespace qchsh
