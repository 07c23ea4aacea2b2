#pragma once

#include <cstdint>
#include <random>

namespace marc {

/// All stochastic components draw from a 64-bit Mersenne Twister. The helpers
/// below avoid std:: distributions so pinned-seed results are identical across
/// standard library implementations.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline bool bernoulli(Rng& rng, double p) { return p >= 1.0 || uniform01(rng) < p; }

}  // namespace marc
