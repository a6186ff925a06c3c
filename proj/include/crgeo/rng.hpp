#pragma once

#include <cstdint>

#include "crgeo/core.hpp"

namespace crgeo {

// Counter-based generator: the value at (seed, index) is a pure function of
// both, so any sample in a campaign can be regenerated without replaying the
// stream. The mixer is the SplitMix64 finalizer over a Weyl sequence.
inline std::uint64_t rng_word_at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform in [0, 1), 53-bit resolution.
inline double rng_unit_at(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(rng_word_at(seed, index) >> 11) * 0x1.0p-53;
}

// Uniform in [-1, 1].
inline double rng_symmetric_at(std::uint64_t seed, std::uint64_t index) {
  return 2.0 * rng_unit_at(seed, index) - 1.0;
}

// Sequential view over one counter stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t start_index = 0)
      : seed_(seed), index_(start_index) {}

  double unit() { return rng_unit_at(seed_, index_++); }
  double symmetric() { return rng_symmetric_at(seed_, index_++); }

  // Re/im drawn as consecutive counter values, each uniform in [-1, 1].
  cplx complex_box() {
    double re = symmetric();
    double im = symmetric();
    return {re, im};
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
};

// Derives an independent stream for the index-th object of a campaign keyed
// by seed, so object generation order never matters.
inline CounterRng object_stream(std::uint64_t seed, std::uint64_t object_index) {
  return CounterRng(rng_word_at(seed, object_index));
}

}  // namespace crgeo
