#pragma once

#include <cstdint>

#include "qchsh/types.hpp"

namespace qchsh {

// Deterministic seedable generator (splitmix64 core). Every stochastic piece
// of the library draws from an explicit Rng, so a fixed seed reproduces runs
// bit for bit; derived seeds (seed + restart index) keep parallel restarts
// independent of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();

  // Standard normal (Box-Muller, cached spare).
  double gaussian();

  // Independent N(0,1) real and imaginary parts.
  cplx complex_gaussian();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qchsh
