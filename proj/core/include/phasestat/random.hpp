#pragma once

// Reproducible random streams.
//
// Generator: xoshiro256** (Blackman & Vigna). State words are filled by
// SplitMix64 from a 64-bit key derived from (seed, stream keys...), so every
// (seed, cell, replicate) tuple names an independent, platform-stable stream.
// Uniform doubles use the top 53 bits; normals use Box-Muller.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace phasestat {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;
  /// Independent stream for (seed, keys...).
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform integer on [0, n), n > 0, without modulo bias.
  std::size_t below(std::size_t n) noexcept;
  /// Standard normal variate.
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_{0.0};
  bool has_cached_{false};
};

}  // namespace phasestat
