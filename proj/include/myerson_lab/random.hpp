#pragma once

#include <cstdint>
#include <limits>

namespace myerson_lab {

/// Mixes a seed with a sequence of stream coordinates (trial index, cell
/// index, ...) into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// SplitMix64 stream. Satisfies UniformRandomBitGenerator so it can drive
/// the <random> distributions, and is cheap enough to construct once per
/// Monte Carlo trial.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool coin() { return ((*this)() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

/// The RNG stream for one trial of a seeded Monte Carlo run.
inline Stream trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return Stream(derive_seed(seed, trial));
}

}  // namespace myerson_lab
