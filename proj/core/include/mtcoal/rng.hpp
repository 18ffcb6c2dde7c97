#pragma once

#include <cmath>
#include <cstdint>

namespace mtcoal {

// SplitMix64: splittable 64-bit-seed generator. Chosen over std::mt19937_64
// because its output is pinned by the algorithm alone, so artifacts built
// from a recorded seed are bit-reproducible across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased draw from {0, ..., bound-1} by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t v = next_u64();
    while (v > limit) v = next_u64();
    return v % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate.
  double next_exponential(double rate) { return -std::log1p(-next_double()) / rate; }

  // Independent child stream, deterministic in (seed, salt).
  SplitMix64 split(std::uint64_t salt) const {
    SplitMix64 mixer(seed_ ^ (0xb5297a4d3f2c1e09ull * (salt + 1)));
    std::uint64_t child = mixer.next_u64();
    (void)mixer.next_u64();
    return SplitMix64(child);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace mtcoal
