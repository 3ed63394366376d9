// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace sskernel::random {

/// SplitMix64 output finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Counter-based random stream.
 *
 * The k-th word of stream (seed, id) is a pure function of (seed, id, k), so
 * any worker can draw any entry without sharing state. Path p of a Monte Carlo
 * run uses stream (seed, p); results do not depend on scheduling.
 */
class Stream {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr Stream(std::uint64_t seed, std::uint64_t id) noexcept
      : key_(mix64(mix64(seed + kGamma) ^ mix64(id * 0xd1b54a32d192ed03ULL + 1))) {}

  constexpr std::uint64_t word(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGamma);
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw at position `index` (Box-Muller on word pairs).
  double normal(std::uint64_t index) const noexcept {
    const std::uint64_t pair = index / 2;
    // (0, 1] so the logarithm stays finite
    const double u1 = static_cast<double>((word(2 * pair) >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform(2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (index % 2 == 0) ? r * std::cos(angle) : r * std::sin(angle);
  }

 private:
  std::uint64_t key_;
};

/// Sequential view over a Stream; satisfies UniformRandomBitGenerator.
class Engine {
 public:
  using result_type = std::uint64_t;

  constexpr Engine(std::uint64_t seed, std::uint64_t id) noexcept : stream_(seed, id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept { return stream_.word(counter_++); }
  constexpr double uniform() noexcept { return stream_.uniform(counter_++); }
  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept { return stream_.normal(normal_index_++); }

 private:
  Stream stream_;
  std::uint64_t counter_ = 0;
  // Normals are drawn from a disjoint region of the counter space.
  std::uint64_t normal_index_ = std::uint64_t{1} << 62;
};

}  // namespace sskernel::random
