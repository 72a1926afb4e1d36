#ifndef PERCDET_RANDOM_HPP
#define PERCDET_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace percdet {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent sub-experiment, e.g. one Monte Carlo trial.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + index * 0x9e3779b97f4a7c15ULL);
}

/// Counter-based random stream: word k depends only on (seed, k), so any
/// pixel or site can be drawn independently of evaluation order.
class CounterStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr CounterStream(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  constexpr std::uint64_t word(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGamma);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  constexpr double open_uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(std::uint64_t counter, double p) const noexcept { return uniform(counter) < p; }

  /// Standard normal variate number k (Box-Muller, cosine branch), built
  /// from words 2k and 2k+1.
  double normal(std::uint64_t k) const noexcept {
    const double u1 = open_uniform(2 * k);
    const double u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace percdet

#endif  // PERCDET_RANDOM_HPP
