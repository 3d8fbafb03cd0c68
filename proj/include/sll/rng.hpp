#pragma once

#include <cstdint>

namespace sll {

/// SplitMix64 (Steele, Lea and Vigna). 64-bit state, fixed odd increment,
/// avalanche finalizer. Chosen because the output sequence is fully specified
/// by this header, unlike the standard library distributions, so runs are
/// reproducible bit for bit across platforms.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) using the top 53 bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection, bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

private:
  std::uint64_t state_;
};

/// The SplitMix64 finalizer as a standalone mixing function; used to derive
/// decorrelated substream seeds from (seed XOR stream-index).
inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Identifier recorded in run manifests so outputs are traceable to the
/// generator that produced them.
inline constexpr const char* kGeneratorId = "splitmix64";

}  // namespace sll
