#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace specsim {

// Seeded PRNG. All conversions from raw bits are hand-rolled so a seed
// reproduces the exact same sequence regardless of the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Box-Muller, cosine branch only (no cached second value).
  double normal(double mean, double sd) {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
  }

  // Geometric on {1, 2, ...} with the given mean (>= 1), via inverse CDF.
  long long geometric(double mean) {
    if (mean <= 1.0) return 1;
    const double p = 1.0 / mean;
    const double u = uniform();
    const double k = std::floor(std::log1p(-u) / std::log1p(-p));
    return 1 + static_cast<long long>(std::max(0.0, k));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace specsim
