#pragma once

#include <cstdint>
#include <random>

#include "laxtower/laurent.hpp"

namespace laxtower {

/// Seeded generator for probe data; the same seed always yields the same probes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }
  /// Independent generator for probe `index` (stable regardless of call order).
  Rng fork(std::uint64_t index) { return Rng(eng_() ^ (0x9E3779B97F4A7C15ULL * (index + 1))); }

  /// Trigonometric polynomial with mode k amplitude ≤ amp/(1+k).
  FourierField field(int band, double amp = 1.0, bool zero_mean = false);
  /// Σ_{d=lo..hi} random fields.
  LaurentElement element(int lo, int hi, int band, double amp = 1.0);

 private:
  std::mt19937_64 eng_;
};

}  // namespace laxtower
