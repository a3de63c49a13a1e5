// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, domain, stream, substream, block), so ensembles are reproducible
// regardless of how work is scheduled across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "vlab/torus.hpp"

namespace vlab {

using Philox4x32Ctr = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline Philox4x32Ctr philox4x32_10(Philox4x32Ctr ctr, Philox4x32Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Purpose tags keep independent consumers of one seed on disjoint counters.
enum class RngDomain : std::uint32_t {
  kBrownian = 1,
  kInitialPositions = 2,
  kWhiteNoise = 3,
  kRejection = 4,
  kTestCases = 5,
  kIntensities = 6,
  kBackwardFlow = 7,
};

/// Two 32-bit words -> double in [0, 1) with 53 random bits.
inline double words_to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Box-Muller on a block's 128 bits; returns two independent N(0,1).
inline std::pair<double, double> block_to_normals(const Philox4x32Ctr& w) {
  const double u1 = 1.0 - words_to_unit(w[0], w[1]);  // (0, 1]
  const double u2 = words_to_unit(w[2], w[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = kTwoPi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

/// Sequential stream over consecutive Philox blocks of one counter prefix.
///
/// Counter layout: {block, substream, stream, domain}; key = seed.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, RngDomain domain, std::uint32_t stream, std::uint32_t substream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream),
        substream_(substream),
        domain_(static_cast<std::uint32_t>(domain)) {}

  /// Random-access block; does not disturb the sequential position.
  Philox4x32Ctr block(std::uint32_t index) const {
    return philox4x32_10({index, substream_, stream_, domain_}, key_);
  }

  std::pair<double, double> normal_pair_at(std::uint32_t index) const { return block_to_normals(block(index)); }

  /// Next uniform in [0, 1).
  double uniform() {
    if (word_ + 2 > 4) refill();
    const double u = words_to_unit(buffer_[word_], buffer_[word_ + 1]);
    word_ += 2;
    return u;
  }

  /// Next standard normal (Box-Muller, second variate cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto [a, b] = block_to_normals(block(next_block_++));
    spare_ = b;
    has_spare_ = true;
    return a;
  }

 private:
  void refill() {
    buffer_ = block(next_block_++);
    word_ = 0;
  }

  Philox4x32Key key_;
  std::uint32_t stream_;
  std::uint32_t substream_;
  std::uint32_t domain_;
  std::uint32_t next_block_ = 0;
  Philox4x32Ctr buffer_{};
  int word_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Brownian increments dW^j ~ N(0, dt) for one (trajectory, step), keyed on
/// the field index j: field j uses block j/2, component j%2.
inline void brownian_increments(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t step, double dt,
                                std::vector<double>& out, RngDomain domain = RngDomain::kBrownian) {
  const CounterStream rng(seed, domain, trajectory, step);
  const double scale = std::sqrt(dt);
  for (std::size_t j = 0; j < out.size(); j += 2) {
    const auto [a, b] = rng.normal_pair_at(static_cast<std::uint32_t>(j / 2));
    out[j] = scale * a;
    if (j + 1 < out.size()) out[j + 1] = scale * b;
  }
}

}  // namespace vlab
