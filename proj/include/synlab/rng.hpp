// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "synlab/normal.hpp"

namespace synlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: output is a pure function of counter and key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// Reproducible random draws addressed by (grid point, epoch, draw index).
///
/// Draw k of epoch e at grid point d depends only on (seed, d, e, k), so
/// any partitioning of the work across threads yields the same numbers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint32_t grid_index, std::uint64_t epoch, std::uint32_t draw) const {
    const Philox4x32::Counter ctr = {draw, static_cast<std::uint32_t>(epoch),
                                     static_cast<std::uint32_t>(epoch >> 32), grid_index};
    const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                                 static_cast<std::uint32_t>(seed_ >> 32)};
    const Philox4x32::Counter out = Philox4x32::generate(ctr, key);
    return (std::uint64_t{out[0]} << 32) | out[1];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint32_t grid_index, std::uint64_t epoch, std::uint32_t draw) const {
    return static_cast<double>(bits(grid_index, epoch, draw) >> 11) * 0x1.0p-53;
  }

  /// Standard normal by inverse-CDF transform of an open-interval uniform.
  double normal(std::uint32_t grid_index, std::uint64_t epoch, std::uint32_t draw) const {
    const double u =
        (static_cast<double>(bits(grid_index, epoch, draw) >> 11) + 0.5) * 0x1.0p-53;
    return normal_quantile(u);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace synlab
