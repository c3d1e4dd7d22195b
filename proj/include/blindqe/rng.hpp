#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "blindqe/angle.hpp"

namespace blindqe {

/// Source of every random decision made by the simulators.
///
/// Protocol code only ever asks for biased bits and uniform choices, which
/// lets the same code run either under a seeded generator (Monte Carlo) or
/// under a branch enumerator that walks every outcome exactly.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  virtual bool bernoulli(double p_one) = 0;
  virtual std::uint64_t uniform_below(std::uint64_t n) = 0;
  /// Uniform double in [0, 1). Sources that enumerate branches cannot provide it.
  virtual double uniform01() = 0;

  bool fair_bit() { return uniform_below(2) == 1; }
  Angle8 uniform_angle() { return Angle8{static_cast<int>(uniform_below(8))}; }
};

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64. Output is identical on every
/// platform, unlike the std:: distributions.
class Rng final : public RandomSource {
 public:
  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  /// Independent stream for trial `index` of a run seeded with `seed`.
  /// Counter-based, so results never depend on how trials are scheduled.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t mix = seed ^ 0xD1B54A32D192ED03ULL;
    std::uint64_t a = splitmix64(mix);
    std::uint64_t b = index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL;
    std::uint64_t c = a ^ splitmix64(b);
    return Rng{c};
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform01() override { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p_one) override { return uniform01() < p_one; }

  std::uint64_t uniform_below(std::uint64_t n) override {
    if (n == 0) throw std::invalid_argument("uniform_below: empty range");
    // Rejection on the top of the range keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

/// Poisson(lambda) by sequential inversion, split into chunks of mean <= 16
/// so e^{-lambda} never underflows.
inline std::uint64_t sample_poisson(RandomSource& rng, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("sample_poisson: negative mean");
  std::uint64_t total = 0;
  double remaining = lambda;
  while (remaining > 0.0) {
    const double chunk = std::min(remaining, 16.0);
    remaining -= chunk;
    double p = std::exp(-chunk);
    double cdf = p;
    const double u = rng.uniform01();
    std::uint64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= chunk / static_cast<double>(k);
      cdf += p;
      if (p == 0.0 && u >= cdf) break;  // u lands in the numerically empty tail
    }
    total += k;
  }
  return total;
}

}  // namespace blindqe
