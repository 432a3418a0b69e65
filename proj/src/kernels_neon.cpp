// NEON kernel variants (aarch64 baseline, no extra flags). One 128-bit vector
// holds a single interleaved complex<double>; same re/im accumulator split as
// the AVX2 variant with the addsub fold expressed via a sign constant.

#include <arm_neon.h>

#include <cstring>

#include "qchsh/kernels.hpp"

namespace qchsh::kern::neon {

namespace {

const float64x2_t kSign = {-1.0, 1.0};

inline void matmul_impl(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                        std::size_t n, bool accumulate) {
  const double* bd = reinterpret_cast<const double*>(b);
  for (std::size_t i = 0; i < m; ++i) {
    const cplx* a_row = a + i * k;
    double* crow = reinterpret_cast<double*>(c + i * n);
    for (std::size_t j = 0; j < n; ++j) {
      float64x2_t acc_re = vdupq_n_f64(0.0);
      float64x2_t acc_im = vdupq_n_f64(0.0);
      for (std::size_t l = 0; l < k; ++l) {
        const cplx al = a_row[l];
        const float64x2_t bv = vld1q_f64(bd + 2 * (l * n + j));
        const float64x2_t bs = vextq_f64(bv, bv, 1);
        acc_re = vfmaq_n_f64(acc_re, bv, al.real());
        acc_im = vfmaq_n_f64(acc_im, bs, al.imag());
      }
      float64x2_t sum = vfmaq_f64(acc_re, acc_im, kSign);
      if (accumulate) sum = vaddq_f64(sum, vld1q_f64(crow + 2 * j));
      vst1q_f64(crow + 2 * j, sum);
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
  for (std::size_t j = 0; j < n; ++j) {
    const float64x2_t xv = vld1q_f64(xd + 2 * j);
    const float64x2_t xs = vextq_f64(xv, xv, 1);
    const float64x2_t re = vmulq_n_f64(xv, alpha.real());
    const float64x2_t im = vmulq_n_f64(xs, alpha.imag());
    vst1q_f64(yd + 2 * j, vfmaq_f64(re, im, kSign));
  }
}

}  // namespace qchsh::kern::neon
