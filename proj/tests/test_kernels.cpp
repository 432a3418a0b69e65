#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <vector>

#include "qchsh/kernels.hpp"
#include "qchsh/rng.hpp"

using namespace qchsh;

namespace {

std::vector<cplx> random_buf(std::size_t n, Rng& rng) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = rng.complex_gaussian();
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Independent reference: textbook triple loop, no library code involved.
std::vector<cplx> naive_matmul(const std::vector<cplx>& a, const std::vector<cplx>& b,
                               std::size_t m, std::size_t k, std::size_t n) {
  std::vector<cplx> c(m * n, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc{0.0, 0.0};
      for (std::size_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
      c[i * n + j] = acc;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("scalar matmul matches a naive triple loop") {
  Rng rng(3);
  for (std::size_t m : {1, 2, 3, 5, 8}) {
    for (std::size_t k : {1, 2, 4, 7}) {
      for (std::size_t n : {1, 2, 3, 6}) {
        const auto a = random_buf(m * k, rng);
        const auto b = random_buf(k * n, rng);
        std::vector<cplx> c(m * n);
        kern::scalar::matmul(c.data(), a.data(), b.data(), m, k, n);
        CHECK(max_diff(c, naive_matmul(a, b, m, k, n)) < 1e-12);
      }
    }
  }
}

TEST_CASE("dispatched matmul agrees with the scalar reference") {
  Rng rng(11);
  // Odd sizes exercise the vector-width tails.
  for (std::size_t m : {1, 2, 3, 5, 8, 16, 17}) {
    for (std::size_t k : {1, 2, 4, 7, 16, 31}) {
      for (std::size_t n : {1, 2, 3, 8, 15, 32}) {
        const auto a = random_buf(m * k, rng);
        const auto b = random_buf(k * n, rng);
        std::vector<cplx> c_hot(m * n), c_ref(m * n);
        kern::matmul(c_hot.data(), a.data(), b.data(), m, k, n);
        kern::scalar::matmul(c_ref.data(), a.data(), b.data(), m, k, n);
        CHECK(max_diff(c_hot, c_ref) < 1e-12);
      }
    }
  }
}

TEST_CASE("matmul_acc adds the product onto the accumulator") {
  Rng rng(17);
  const std::size_t m = 9, k = 13, n = 10;
  const auto a = random_buf(m * k, rng);
  const auto b = random_buf(k * n, rng);
  const auto c0 = random_buf(m * n, rng);

  auto c_hot = c0;
  kern::matmul_acc(c_hot.data(), a.data(), b.data(), m, k, n);

  auto c_ref = c0;
  kern::scalar::matmul_acc(c_ref.data(), a.data(), b.data(), m, k, n);
  CHECK(max_diff(c_hot, c_ref) < 1e-12);

  auto expected = naive_matmul(a, b, m, k, n);
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] += c0[i];
  CHECK(max_diff(c_hot, expected) < 1e-12);
}

TEST_CASE("scale multiplies every entry by a complex factor") {
  Rng rng(23);
  for (std::size_t n : {1, 2, 5, 16, 33}) {
    const auto x = random_buf(n, rng);
    const cplx alpha = rng.complex_gaussian();
    std::vector<cplx> y_hot(n), y_ref(n), expected(n);
    kern::scale(y_hot.data(), alpha, x.data(), n);
    kern::scalar::scale(y_ref.data(), alpha, x.data(), n);
    for (std::size_t i = 0; i < n; ++i) expected[i] = alpha * x[i];
    CHECK(max_diff(y_hot, y_ref) < 1e-14);
    CHECK(max_diff(y_hot, expected) < 1e-14);
  }
}

TEST_CASE("active ISA reports a printable name") {
  const char* name = kern::isa_name(kern::active_isa());
  REQUIRE(name != nullptr);
  CHECK(std::strlen(name) > 0);
}
