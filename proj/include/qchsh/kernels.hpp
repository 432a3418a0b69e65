#pragma once

#include <cstddef>

#include "qchsh/types.hpp"

// Low-level dense kernels on packed row-major complex<double> buffers.
//
// complex<double> is stored interleaved (re, im), so a 256-bit AVX2 register
// holds two entries and a 128-bit NEON register holds one. The product
// (ar + i*ai)(br + i*bi) splits into two independent fused accumulations,
//   acc_re += ar * [br, bi, ...]        (element-wise)
//   acc_im += ai * [bi, br, ...]        (pair-swapped)
// combined once per row block with addsub: even lanes acc_re - acc_im give
// real parts, odd lanes acc_re + acc_im give imaginary parts.
//
// The scalar namespace is the reference implementation; SIMD variants are
// selected at runtime and must agree with it within rounding (equivalence
// tests enforce this). QCHSH_KERNEL=scalar|avx2|neon overrides the choice.
namespace qchsh::kern {

enum class Isa { Scalar, Avx2, Neon };

// Instruction set the dispatched entry points are using.
Isa active_isa();
const char* isa_name(Isa isa);

// c = a * b for row-major a (m x k), b (k x n), c (m x n).
void matmul(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k, std::size_t n);

// c += a * b.
void matmul_acc(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                std::size_t n);

// y = alpha * x, n entries.
void scale(cplx* y, cplx alpha, const cplx* x, std::size_t n);

namespace scalar {
void matmul(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k, std::size_t n);
void matmul_acc(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                std::size_t n);
void scale(cplx* y, cplx alpha, const cplx* x, std::size_t n);
}  // namespace scalar

#if defined(QCHSH_HAVE_AVX2_TU)
namespace avx2 {
bool supported();
void matmul(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k, std::size_t n);
void matmul_acc(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                std::size_t n);
void scale(cplx* y, cplx alpha, const cplx* x, std::size_t n);
}  // namespace avx2
#endif

#if defined(QCHSH_HAVE_NEON_TU)
namespace neon {
void matmul(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k, std::size_t n);
void matmul_acc(cplx* c, const cplx* a, const cplx* b, std::size_t m, std::size_t k,
                std::size_t n);
void scale(cplx* y, cplx alpha, const cplx* x, std::size_t n);
}  // namespace neon
#endif

}  // namespace qchsh::kern
