#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qacc/constants.hpp"

namespace qacc {

// Seeded Gaussian source. Box-Muller on top of mt19937_64 keeps the sample
// stream identical across standard-library implementations, which the
// byte-identical-rerun guarantee relies on.
class GaussianSampler {
 public:
  explicit GaussianSampler(uint64_t seed) : rng_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(constants::two_pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 rng_;
};

} // namespace qacc
