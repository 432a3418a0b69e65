#include "qchsh/kernels.hpp"

#include <cstdlib>
#include <algorithm>
#include <cstring>
#include <string>

namespace qchsh::kern {

namespace scalar {

void matmul_acc(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const cplx ail = a[i * k + l];
      if (ail == cplx{0.0, 0.0}) continue;
      const cplx* brow = b + l * n;
      cplx* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ail * brow[j];
    }
  }
}

void matmul(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k, std::size_t n) {
  std::fill(c, c + m * n, cplx{0.0, 0.0});
  matmul_acc(c, a, b, m, k, n);
}

void scale(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] = alpha * x[j];
}

}  // namespace scalar

namespace {

struct Dispatch {
  Isa isa;
  void (*matmul)(cplx*, const cplx*, const cplx*, std::size_t, std::size_t, std::size_t);
  void (*matmul_acc)(cplx*, const cplx*, const cplx*, std::size_t, std::size_t, std::size_t);
  void (*scale)(cplx*, cplx, const cplx*, std::size_t);
};

Dispatch pick() {
  Dispatch d{Isa::Scalar, &scalar::matmul, &scalar::matmul_acc, &scalar::scale};
  const char* force = std::getenv("QCHSH_KERNEL");
  const std::string want = force ? force : "";
  if (want == "scalar") return d;
#if defined(QCHSH_HAVE_AVX2_TU)
  if (avx2::supported() && (want.empty() || want == "avx2")) {
    return {Isa::Avx2, &avx2::matmul, &avx2::matmul_acc, &avx2::scale};
  }
#endif
#if defined(QCHSH_HAVE_NEON_TU)
  if (want.empty() || want == "neon") {
    return {Isa::Neon, &neon::matmul, &neon::matmul_acc, &neon::scale};
  }
#endif
  return d;
}

const Dispatch& table() {
  static const Dispatch d = pick();
  return d;
}

}  // namespace

Isa active_isa() { return table().isa; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
    default:
      return "scalar";
  }
}

void matmul(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k, std::size_t n) {
  table().matmul(c, a, b, m, k, n);
}

void matmul_acc(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                std::size_t n) {
  table().matmul_acc(c, a, b, m, k, n);
}

void scale(cplx* y, cplx alpha, const cplx* x, std::size_t n) { table().scale(y, alpha, x, n); }

}  // namespace qchsh::kern
