// Counter-based deterministic randomness.
//
// Every random number is a pure function of (key, counter):
//
//   bits(key, n) = splitmix64_finalize(key + (n + 1) * 0x9E3779B97F4A7C15)
//   uniform      = (bits >> 11) * 2^-53                    in [0, 1)
//   normal       = Box-Muller on two consecutive uniforms (cosine branch)
//
// splitmix64_finalize(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//                         z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31.
//
// Only integer arithmetic and IEEE log/cos/sqrt are involved, so generated
// datasets are identical on any conforming platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pfopt {

inline constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) {
  return splitmix64_finalize(key + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

// Derive a child key, e.g. (run seed, step) -> sample id.
inline constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t tag) {
  return splitmix64_finalize(counter_bits(key, tag) ^ 0xD1B54A32D192ED03ULL);
}

// Sequential view over the counter stream for one key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t start = 0)
      : key_(key), counter_(start) {}

  std::uint64_t next_bits() { return counter_bits(key_, counter_++); }

  double uniform() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }

  double normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n) by rejection on the top bits.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t b;
    do b = next_bits();
    while (b >= limit);
    return b % n;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace pfopt
