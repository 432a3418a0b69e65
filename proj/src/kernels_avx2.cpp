// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma; only reached after the
// runtime check in kernels.cpp, so no other translation unit needs the flags.

#include <immintrin.h>

#include <cstring>

#include "qchsh/kernels.hpp"

namespace qchsh::kern::avx2 {

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

// Accumulates two complex entries of a row of c. See kernels.hpp for the
// re/im split; bs is b with each (re, im) pair swapped.
inline void row_block(const cplx* a_row, const double* bd, double* crow, std::size_t k,
                      std::size_t n, std::size_t j, bool accumulate) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  for (std::size_t l = 0; l < k; ++l) {
    const cplx al = a_row[l];
    const __m256d ar = _mm256_set1_pd(al.real());
    const __m256d ai = _mm256_set1_pd(al.imag());
    const __m256d bv = _mm256_loadu_pd(bd + 2 * (l * n + j));
    const __m256d bs = _mm256_permute_pd(bv, 0x5);
    acc_re = _mm256_fmadd_pd(ar, bv, acc_re);
    acc_im = _mm256_fmadd_pd(ai, bs, acc_im);
  }
  __m256d sum = _mm256_addsub_pd(acc_re, acc_im);
  if (accumulate) sum = _mm256_add_pd(sum, _mm256_loadu_pd(crow + 2 * j));
  _mm256_storeu_pd(crow + 2 * j, sum);
}

inline void matmul_impl(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                        std::size_t n, bool accumulate) {
  const double* bd = reinterpret_cast<const double*>(b);
  for (std::size_t i = 0; i < m; ++i) {
    const cplx* a_row = a + i * k;
    double* crow = reinterpret_cast<double*>(c + i * n);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) row_block(a_row, bd, crow, k, n, j, accumulate);
    for (; j < n; ++j) {  // odd trailing column
      cplx sum{0.0, 0.0};
      for (std::size_t l = 0; l < k; ++l) sum += a_row[l] * b[l * n + j];
      cplx* cj = c + i * n + j;
      *cj = accumulate ? *cj + sum : sum;
    }
  }
}

}  // namespace

void matmul(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k, std::size_t n) {
  matmul_impl(c, a, b, m, k, n, false);
}

void matmul_acc(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                std::size_t n) {
  matmul_impl(c, a, b, m, k, n, true);
}

void scale(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * j);
    const __m256d xs = _mm256_permute_pd(xv, 0x5);
    _mm256_storeu_pd(yd + 2 * j, _mm256_addsub_pd(_mm256_mul_pd(ar, xv), _mm256_mul_pd(ai, xs)));
  }
  for (; j < n; ++j) y[j] = alpha * x[j];
}

}  // namespace qchsh::kern::avx2
