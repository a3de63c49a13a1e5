// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <vector>

#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"
#include "vlab/stats.hpp"

using namespace vlab;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (Philox4x32Ctr{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Philox4x32Ctr{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Philox4x32Ctr{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterStream, ReproducibleAndDisjoint) {
  CounterStream a(42, RngDomain::kWhiteNoise, 3);
  CounterStream b(42, RngDomain::kWhiteNoise, 3);
  CounterStream c(42, RngDomain::kWhiteNoise, 4);
  CounterStream d(42, RngDomain::kBrownian, 3);
  for (int i = 0; i < 10; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    EXPECT_NE(x, c.normal());
    EXPECT_NE(x, d.normal());
  }
}

TEST(CounterStream, UniformInRangeAndNormalMoments) {
  CounterStream s(1, RngDomain::kTestCases, 0);
  stats::RunningStats u, z, z2;
  for (int i = 0; i < 200000; ++i) {
    const double v = s.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    u.add(v);
    const double n = s.normal();
    z.add(n);
    z2.add(n * n);
  }
  EXPECT_NEAR(u.mean(), 0.5, 4 * u.stderr_mean());
  EXPECT_NEAR(z.mean(), 0.0, 4 * z.stderr_mean());
  EXPECT_NEAR(z2.mean(), 1.0, 4 * z2.stderr_mean());
}

TEST(BrownianIncrements, KeyedByFieldIndex) {
  std::vector<double> a(5), b(3);
  brownian_increments(9, 2, 17, 1e-2, a);
  brownian_increments(9, 2, 17, 1e-2, b);
  for (std::size_t j = 0; j < b.size(); ++j) EXPECT_EQ(a[j], b[j]);
  std::vector<double> c(5);
  brownian_increments(9, 2, 18, 1e-2, c);
  EXPECT_NE(a[0], c[0]);
}

TEST(Stats, RunningStatsMergeMatchesSequential) {
  stats::RunningStats all, left, right;
  for (int i = 0; i < 100; ++i) {
    const double v = std::sin(i * 0.7) + 0.01 * i;
    all.add(v);
    (i < 37 ? left : right).add(v);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), all.count());
  EXPECT_NEAR(left.mean(), all.mean(), 1e-14);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-13);
}

TEST(Stats, KolmogorovSmirnov) {
  std::vector<double> grid(1000);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = (i + 0.5) / 1000.0;
  const auto good = stats::ks_uniform(grid);
  EXPECT_NEAR(good.statistic, 0.0005, 1e-12);
  EXPECT_GT(good.p_value, 0.99);
  std::vector<double> skewed(1000);
  for (std::size_t i = 0; i < skewed.size(); ++i) skewed[i] = grid[i] * grid[i];
  EXPECT_LT(stats::ks_uniform(skewed).p_value, 1e-6);
  // Tabulated critical value: P(K > 1.358) = 0.05
  EXPECT_NEAR(stats::kolmogorov_survival(1.358), 0.05, 5e-4);
}

TEST(Stats, JarqueBeraHasPower) {
  CounterStream s(3, RngDomain::kTestCases, 1);
  std::vector<double> gauss(2000), expo(2000);
  for (std::size_t i = 0; i < gauss.size(); ++i) {
    gauss[i] = s.normal();
    expo[i] = -std::log(1.0 - s.uniform());
  }
  EXPECT_GT(stats::jarque_bera(gauss).p_value, 1e-3);
  EXPECT_LT(stats::jarque_bera(expo).p_value, 1e-10);
}

TEST(Stats, SlopesAndBands) {
  EXPECT_NEAR(stats::loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}), 2.0, 1e-12);
  EXPECT_NEAR(stats::three_sigma_alpha(), 0.0026997960632601, 1e-12);
  EXPECT_NEAR(stats::sidak_band(0.05, 1), 1.959963984540054, 1e-9);
  // Many checks need a wider band than one check.
  EXPECT_GT(stats::sidak_band(stats::three_sigma_alpha(), 100), 3.0);
  EXPECT_NEAR(stats::sidak_band(stats::three_sigma_alpha(), 1), 3.0, 1e-9);
}

TEST(Parallel, MapIsOrderedAndThreadCountIndependent) {
  auto f = [](std::size_t i) {
    CounterStream s(5, RngDomain::kTestCases, static_cast<std::uint32_t>(i));
    return s.normal();
  };
  const auto a = parallel_map(257, f, 1);
  const auto b = parallel_map(257, f, 4);
  EXPECT_EQ(a, b);
}
