// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vlab/noise_model.hpp"
#include "vlab/rng.hpp"
#include "vlab/stats.hpp"

using namespace vlab;

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 random_point(CounterStream& s) { return {s.uniform(), s.uniform()}; }

}  // namespace

TEST(BuildBasis, CanonicalOrderAndFirstField) {
  const auto b = build_basis(3.0, 9);
  ASSERT_EQ(b.size(), 9u);
  const std::vector<Mode> expect{{0, 1}, {1, 0}, {1, -1}, {1, 1}, {0, 2}};
  EXPECT_EQ(b.modes(), expect);
  // a_(0,1)(x) = sqrt2 cos(2 pi x2) (1, 0)
  const Vec2 x{0.37, 0.11};
  const Vec2 v = b.value(0, x);
  EXPECT_NEAR(v.x, std::sqrt(2.0) * std::cos(2 * kPi * 0.11), 1e-15);
  EXPECT_EQ(v.y, 0.0);
  EXPECT_EQ(b.field(8).branch, Branch::kCos);
  EXPECT_THROW(build_basis(1.5, 4), std::invalid_argument);
  EXPECT_THROW(build_basis(3.0, 0), std::invalid_argument);
}

TEST(BuildBasis, HalfLatticeOrderingIsDeterministic) {
  const auto modes = NoiseBasis::half_lattice_modes(40);
  for (std::size_t i = 1; i < modes.size(); ++i) {
    EXPECT_TRUE(modes[i].in_half_lattice());
    const bool ordered = modes[i - 1].norm_sq() < modes[i].norm_sq() ||
                         (modes[i - 1].norm_sq() == modes[i].norm_sq() && modes[i - 1] < modes[i]);
    EXPECT_TRUE(ordered);
  }
}

TEST(BuildBasis, FieldsAreDivergenceFreeAndPeriodic) {
  const auto b = build_basis(3.0, 24);
  CounterStream s(2, RngDomain::kTestCases, 0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    EXPECT_TRUE(b.field(j).field.is_divergence_free(1e-12));
    for (int t = 0; t < 100; ++t) {
      const Vec2 x = random_point(s);
      const Mat2 J = b.field(j).jacobian(x);
      EXPECT_LT(std::abs(J(0, 0) + J(1, 1)), 1e-12);
      const Vec2 a = b.value(j, x);
      const Vec2 c = b.value(j, Vec2{x.x + 1.0, x.y - 1.0});
      EXPECT_NEAR(a.x, c.x, 1e-12);
      EXPECT_NEAR(a.y, c.y, 1e-12);
    }
  }
}

TEST(BuildBasis, ClosedFormMatchesFourierRepresentation) {
  const auto b = build_basis(2.5, 12);
  CounterStream s(3, RngDomain::kTestCases, 0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const Vec2 x = random_point(s);
    const auto& f = b.field(j);
    EXPECT_NEAR(f.value(x).x, f.field(x).x, 1e-13);
    EXPECT_NEAR(f.value(x).y, f.field(x).y, 1e-13);
    const Mat2 J = f.jacobian(x);
    const Mat2 R = f.field.jacobian(x);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) EXPECT_NEAR(J(r, c), R(r, c), 1e-12);
  }
}

TEST(BuildBasis, SupNormAtGammaTwo) {
  // mode (1,1), gamma = 2: ||sigma||_inf = sqrt2 * |k|^{1-gamma} = 1
  const auto b = NoiseBasis::family_modes(2.0, {Mode{1, 1}});
  EXPECT_NEAR(norm(b.value(0, Vec2{0.0, 0.0})), 1.0, 1e-15);
  EXPECT_TRUE(b.experimental());
}

TEST(H2Sums, TwoModesFrozenValue) {
  const auto b = NoiseBasis::family_modes(3.0, {Mode{0, 1}, Mode{1, 0}});
  const auto r = h2_sums(b);
  EXPECT_NEAR(r.sum_sup_sq, 4.0, 1e-15);
  EXPECT_NEAR(r.sum_sup_sq_real, 8.0, 1e-15);
  EXPECT_EQ(r.sum_sigma_grad_sigma, 0.0);
  EXPECT_FALSE(r.diverges);
  EXPECT_TRUE(std::isfinite(r.tail_bound));
}

TEST(H2Sums, TailBoundCoversExcludedWeight) {
  const double gamma = 3.0;
  const auto b = build_basis(gamma, 16);
  const auto r = h2_sums(b);
  const double total = truncated_family_sum(gamma, 2000.0);
  EXPECT_GE(r.sum_sup_sq + r.tail_bound, total);
  EXPECT_LT(r.sum_sup_sq + r.tail_bound, total * 1.05);
}

TEST(H2Sums, GammaTwoFlagsDivergence) {
  const auto r = h2_sums(build_basis(2.0, 8));
  EXPECT_TRUE(r.diverges);
  EXPECT_TRUE(r.experimental);
  EXPECT_TRUE(std::isinf(r.tail_bound));
}

TEST(H2Sums, GammaTwoGrowsLogarithmically) {
  std::vector<double> logr, sums;
  for (double R : {8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) {
    logr.push_back(std::log(R));
    sums.push_back(truncated_family_sum(2.0, R));
  }
  const double slope = stats::linear_fit(logr, sums).slope;
  EXPECT_NEAR(slope / (2.0 * kPi), 1.0, 0.1);
}

TEST(Covariance, HomogeneousForFamily) {
  const auto b = build_basis(3.0, 10);
  const Mat2 q0 = covariance(b, Vec2{}, Vec2{});
  CounterStream s(4, RngDomain::kTestCases, 0);
  for (int t = 0; t < 50; ++t) {
    const Vec2 x = random_point(s);
    const Mat2 q = covariance(b, x, x);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) EXPECT_NEAR(q(r, c), q0(r, c), 1e-12);
  }
  EXPECT_LT(h2_sums(b).q_homogeneity_dev, 1e-12);
}

TEST(Covariance, SingleModeAndSymmetry) {
  const auto b = NoiseBasis::family_modes(3.0, {Mode{0, 1}});
  const Mat2 q = covariance(b, Vec2{0.2, 0.3}, Vec2{0.2, 0.3});
  EXPECT_NEAR(q(0, 0), 2.0, 1e-15);
  EXPECT_EQ(q(0, 1), 0.0);
  EXPECT_EQ(q(1, 1), 0.0);
  const auto big = build_basis(3.0, 7);
  const Vec2 x{0.1, 0.8}, y{0.45, 0.2};
  const Mat2 a = covariance(big, x, y);
  const Mat2 t = covariance(big, y, x).transposed();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(a(r, c), t(r, c), 1e-15);
  EXPECT_EQ(covariance(NoiseBasis{}, x, y), Mat2{});
}

TEST(Covariance, RealPairMatchesComplexFamilyPerMode) {
  const double gamma = 3.5;
  CounterStream s(6, RngDomain::kTestCases, 0);
  for (const Mode k : NoiseBasis::half_lattice_modes(12)) {
    const auto b = NoiseBasis::family_modes(gamma, {k});
    const Vec2 x = random_point(s), y = random_point(s);
    const Mat2 real = covariance(b, x, y);
    // sigma_k(x) conj(sigma_k(y)) + sigma_{-k}(x) conj(sigma_{-k}(y))
    auto sigma = [&](const Mode& m, const Vec2& p) {
      const cplx e = std::exp(cplx{0.0, phase(m, p)}) / std::pow(m.norm(), gamma);
      const Vec2 kp = m.perp();
      return std::array<cplx, 2>{e * kp.x, e * kp.y};
    };
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        const cplx v = sigma(k, x)[r] * std::conj(sigma(k, y)[c]) + sigma(-k, x)[r] * std::conj(sigma(-k, y)[c]);
        EXPECT_NEAR(v.imag(), 0.0, 1e-14);
        EXPECT_NEAR(real(r, c), v.real(), 1e-14);
      }
  }
}

TEST(ItoCorrection, VanishesForFamily) {
  const auto b = build_basis(3.0, 30);
  CounterStream s(7, RngDomain::kTestCases, 0);
  for (int t = 0; t < 100; ++t) {
    const Vec2 c = ito_correction(b, random_point(s));
    EXPECT_LT(std::abs(c.x) + std::abs(c.y), 1e-12);
  }
}

TEST(ItoCorrection, ConstantFieldsGiveZero) {
  const auto b = NoiseBasis::custom({TrigField::constant({0.3, -1.2}), TrigField::constant({2.0, 0.5})});
  const Vec2 c = ito_correction(b, Vec2{0.4, 0.1});
  EXPECT_EQ(c.x, 0.0);
  EXPECT_EQ(c.y, 0.0);
}

TEST(ItoCorrection, ShearPairMatchesFiniteDifferences) {
  const TrigField s1{TrigPoly::sine({0, 1}), TrigPoly{}};
  const TrigField s2{TrigPoly{}, TrigPoly::sine({1, 0})};
  const auto b = NoiseBasis::custom({s1, s2});
  const double h = 1e-5;
  CounterStream s(8, RngDomain::kTestCases, 0);
  for (int t = 0; t < 20; ++t) {
    const Vec2 x = random_point(s);
    Vec2 fd;
    for (const auto* f : {&s1, &s2}) {
      const Vec2 v = (*f)(x);
      const Vec2 d1 = (1.0 / (2 * h)) * ((*f)(Vec2{x.x + h, x.y}) - (*f)(Vec2{x.x - h, x.y}));
      const Vec2 d2 = (1.0 / (2 * h)) * ((*f)(Vec2{x.x, x.y + h}) - (*f)(Vec2{x.x, x.y - h}));
      fd += v.x * d1 + v.y * d2;
    }
    fd *= 0.5;
    const Vec2 c = ito_correction(b, x);
    EXPECT_NEAR(c.x, fd.x, 1e-8);
    EXPECT_NEAR(c.y, fd.y, 1e-8);
  }
}

TEST(NoiseBasisCustom, RejectsDivergentField) {
  EXPECT_THROW(NoiseBasis::custom({TrigField{TrigPoly::sine({1, 0}), TrigPoly{}}}), std::invalid_argument);
}

TEST(NoiseBasisJson, RoundTrip) {
  const auto b = build_basis(3.0, 7);
  const auto j = b.to_json();
  EXPECT_EQ(j["normalization"], NoiseBasis::kFamilyNormalization);
  const auto back = NoiseBasis::from_json(j);
  ASSERT_EQ(back.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(back.value(i, Vec2{0.3, 0.6}), b.value(i, Vec2{0.3, 0.6}));
  const auto c = NoiseBasis::custom({TrigField{TrigPoly::cosine({0, 2}), TrigPoly{}}});
  const auto cb = NoiseBasis::from_json(c.to_json());
  EXPECT_NEAR(cb.value(0, Vec2{0.1, 0.1}).x, c.value(0, Vec2{0.1, 0.1}).x, 1e-15);
}
