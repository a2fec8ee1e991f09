#pragma once

#include <cstdint>

namespace halflab {

// SplitMix64 finalizer; pure 64-bit integer mixing, identical everywhere.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kMixGamma = 0x9E3779B97F4A7C15ULL;

// n-th output of the SplitMix64 stream started at `seed`.
constexpr std::uint64_t mix_stream(std::uint64_t seed, std::uint64_t n) {
  return mix64(seed + (n + 1) * kMixGamma);
}

// Membership bit of the seeded schema: low bit of the n-th stream output.
constexpr bool seeded_bit(std::uint64_t seed, std::uint64_t n) {
  return (mix_stream(seed, n) & 1ULL) != 0;
}

// Deterministic sub-seed for an indexed trial or round.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_stream(seed, index);
}

// Small deterministic generator for test-instance construction. Not a
// statistical RNG; determinism across platforms is the requirement.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next() { return mix_stream(seed_, counter_++); }

  // Uniform-ish value in [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  // Value in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  bool coin() { return (next() & 1ULL) != 0; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace halflab
