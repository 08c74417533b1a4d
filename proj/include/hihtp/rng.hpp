#pragma once

#include "hihtp/common.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace hihtp {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and a path of tags.
///
/// h = mix64(master); for each tag t: h = mix64(h ^ mix64(t + 0x9E3779B97F4A7C15)).
/// Every consumer of randomness in the library draws from a stream seeded this
/// way, so results do not depend on the order in which trials execute.
std::uint64_t split_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Stream tags used with split_seed.
namespace stream {
inline constexpr std::uint64_t codebook = 1;
inline constexpr std::uint64_t activity = 2;
inline constexpr std::uint64_t channel = 3;
inline constexpr std::uint64_t message = 4;
inline constexpr std::uint64_t noise = 5;
inline constexpr std::uint64_t reciprocity = 6;
inline constexpr std::uint64_t trial = 7;
}  // namespace stream

/// Portable random source: mt19937_64 plus distributions whose output is fully
/// specified here (std:: distributions differ between standard libraries).
///
///  uniform(): (x >> 11) * 2^-53, in [0, 1)
///  normal():  Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2), one value per two draws
///  below(n):  rejection sampling on the top bits
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double normal();
  std::uint64_t below(std::uint64_t n);

  /// Standard normal in the field: N(0,1) for reals, independent N(0,1/2)
  /// components for complex.
  template <Field S>
  S standard_normal() {
    if constexpr (is_complex_v<S>) {
      constexpr double h = 0.70710678118654752440;
      const double re = normal();
      const double im = normal();
      return {h * re, h * im};
    } else {
      return normal();
    }
  }

  /// Uniform k-subset of {0..n-1}, ascending.
  std::vector<Index> choose(Index n, Index k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace hihtp
