#pragma once

// Shared builders for the test binaries.

#include <cmath>
#include <vector>

#include "qchsh/chsh.hpp"
#include "qchsh/matrix.hpp"
#include "qchsh/seesaw.hpp"

namespace qchsh::test {

inline const double kRoot2 = std::sqrt(2.0);
inline const double kTsirelson = 2.0 * std::sqrt(2.0);

inline PureState phi_plus() {
  const cplx s{1.0 / std::sqrt(2.0), 0.0};
  return PureState({2, 2}, {s, cplx{}, cplx{}, s});
}

inline DensityMatrix werner(double v) {
  ComplexMatrix m = phi_plus().projector();
  m *= cplx{v, 0.0};
  ComplexMatrix mix = ComplexMatrix::identity(4);
  mix *= cplx{(1.0 - v) / 4.0, 0.0};
  return DensityMatrix({2, 2}, m + mix);
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.complex_gaussian();
  }
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
  ComplexMatrix g = random_matrix(n, n, rng);
  ComplexMatrix h = g + g.adjoint();
  h *= cplx{0.5, 0.0};
  return h;
}

inline DichotomicObservable random_dichotomic(std::size_t n, Rng& rng) {
  return observable_from_operator(random_hermitian(n, rng));
}

// Canonical settings reaching the quantum maximum on |Phi+>: M1 = sz,
// M2 = sx, N1,2 = (sz +/- sx)/sqrt(2).
struct TsirelsonSettings {
  DichotomicObservable m1, m2, n1, n2;
};

inline TsirelsonSettings tsirelson_settings() {
  ComplexMatrix plus = pauli_z() + pauli_x();
  plus *= cplx{1.0 / std::sqrt(2.0), 0.0};
  ComplexMatrix minus = pauli_z() - pauli_x();
  minus *= cplx{1.0 / std::sqrt(2.0), 0.0};
  return {DichotomicObservable(pauli_z()), DichotomicObservable(pauli_x()),
          DichotomicObservable(plus), DichotomicObservable(minus)};
}

// Best CHSH value of a fixed state by alternating balanced observable
// updates; the projective-observable optimum this converges to is exactly
// what the correlation-matrix criterion predicts.
inline double alternation_max(const DensityMatrix& rho, int restarts, Rng& rng) {
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    ComplexMatrix n1 = balanced_observable_from_operator(random_hermitian(2, rng)).matrix();
    ComplexMatrix n2 = balanced_observable_from_operator(random_hermitian(2, rng)).matrix();
    double value = 0.0;
    for (int it = 0; it < 300; ++it) {
      const ObservableUpdate a =
          update_observables_alexis(rho.matrix(), 2, 2, n1, n2, /*balanced=*/true);
      const ObservableUpdate b =
          update_observables_bobby(rho.matrix(), 2, 2, a.first, a.second, /*balanced=*/true);
      n1 = b.first;
      n2 = b.second;
      const bool settled = std::abs(b.objective - value) < 1e-13;
      value = b.objective;
      if (settled) break;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace qchsh::test
