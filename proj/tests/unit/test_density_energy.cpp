// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "vlab/density_energy.hpp"

namespace vlab {
namespace {

constexpr double kPi = std::numbers::pi;

NoiseBasis heat_basis(double nu) {
  const double a = std::sqrt(2.0 * nu);
  return NoiseBasis::custom({TrigField::constant({a, 0.0}), TrigField::constant({0.0, a})});
}

NoiseBasis shear_basis(double amp) {
  return NoiseBasis::custom({TrigField{amp * TrigPoly::cosine({0, 1}), TrigPoly::constant(0.0)}});
}

const TrigField kNoDrift = TrigField::constant({0.0, 0.0});

ScalarGridField sample(int n, const TrigPoly& p) {
  return ScalarGridField::sample(n, [&](const Vec2& x) { return p(x); });
}

TEST(Grid, ParsevalAndMean) {
  const TrigPoly p = TrigPoly::constant(0.4) + TrigPoly::cosine({1, 2}) + 0.3 * TrigPoly::sine({3, -1});
  const auto g = sample(32, p);
  EXPECT_NEAR(g.l2_norm_sq(), spectral_l2_norm_sq(g), 1e-12);
  EXPECT_NEAR(g.l2_norm_sq(), p.l2_norm_sq(), 1e-12);
  EXPECT_NEAR(g.mean(), 0.4, 1e-14);
  EXPECT_THROW(ScalarGridField(48), std::invalid_argument);
}

TEST(Grid, SpectralInterpolationIsExactForBandLimitedData) {
  const TrigPoly p = TrigPoly::cosine({1, 2}) + 0.3 * TrigPoly::sine({3, -1});
  const auto g = sample(16, p);
  Fft2d fft(16);
  const auto c = fft.forward(g);
  const Vec2 x{0.123, 0.877};
  EXPECT_NEAR(spectral_eval(c, 16, x), p(x), 1e-13);
}

TEST(Grid, BinaryFieldWithSidecar) {
  const auto g = sample(8, TrigPoly::cosine({1, 0}));
  const std::string path = ::testing::TempDir() + "field.bin";
  g.write_bin(path, 0.25);
  std::ifstream is(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  ASSERT_EQ(bytes.size(), 64u * 8u);
  double v1;
  std::memcpy(&v1, bytes.data() + 8 * 8, 8);  // (i1, i2) = (1, 0)
  EXPECT_EQ(v1, g(1, 0));
  std::ifstream js(path + ".json");
  const auto meta = nlohmann::json::parse(js);
  EXPECT_EQ(meta.at("n").get<int>(), 8);
  EXPECT_EQ(meta.at("t").get<double>(), 0.25);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST(Evolve, ConstantsAreInvariant) {
  DensityOptions o;
  o.n = 32;
  o.T = 0.01;
  o.dt = 1e-4;
  const auto s = evolve_density(ScalarGridField(32, 1.0), perp_gradient(TrigPoly::sine({1, 1})), heat_basis(0.01), o);
  for (double v : s.snapshots.back().data()) EXPECT_NEAR(v, 1.0, 1e-14);
  EXPECT_LT(s.gradient_energy, 1e-25);
}

TEST(Evolve, HeatClosedForm) {
  const double nu = 0.01, T = 0.1;
  DensityOptions o;
  o.n = 64;
  o.T = T;
  o.dt = 1e-4;
  const TrigPoly u0 = TrigPoly::cosine({1, 0});
  DensitySeries s;
  const auto r = energy_identity_report(sample(64, u0), kNoDrift, heat_basis(nu), o, &s);
  const double decay = std::exp(-4.0 * kPi * kPi * nu * T);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) worst = std::max(worst, std::abs(s.snapshots.back()(i, j) - decay * std::cos(kTwoPi * i / 64.0)));
  EXPECT_LT(worst, 1e-8);
  EXPECT_NEAR(r.lhs, 0.5 * (1.0 - std::exp(-8.0 * kPi * kPi * nu * T)), 1e-6);
  EXPECT_LT(r.mismatch, 1e-6);
  EXPECT_TRUE(r.bound_ok);
  EXPECT_NEAR(r.min_span_eigenvalue, 2.0 * nu, 1e-15);
}

TEST(Evolve, GradientEnergyFromSnapshotsMatchesOnlineValue) {
  DensityOptions o;
  o.n = 32;
  o.T = 0.02;
  o.dt = 1e-4;
  o.snapshot_every = 1;
  const auto s = evolve_density(sample(32, TrigPoly::cosine({1, 1}) + TrigPoly::sine({2, 0})), kNoDrift, shear_basis(0.5), o);
  EXPECT_NEAR(gradient_energy(s, kNoDrift, shear_basis(0.5)), s.gradient_energy, 1e-14);
}

// Degenerate single-field noise under three different divergence-free drifts.
TEST(Evolve, EnergyIdentityMaximumPrincipleAndMassWithDrifts) {
  const TrigPoly u0 = TrigPoly::cosine({1, 0}) + 0.5 * TrigPoly::sine({2, 1}) + TrigPoly::constant(0.2);
  const std::vector<TrigField> drifts{kNoDrift, perp_gradient(0.1 * TrigPoly::sine({1, 1})),
                                      perp_gradient(0.05 * TrigPoly::cosine({2, 0}) + 0.05 * TrigPoly::sine({0, 1}))};
  DensityOptions o;
  o.n = 64;
  o.T = 0.05;
  o.dt = 1e-4;
  for (const auto& b : drifts) {
    DensitySeries s;
    const auto r = energy_identity_report(sample(64, u0), b, shear_basis(0.5), o, &s);
    EXPECT_LT(r.mismatch, 1e-6);
    EXPECT_TRUE(r.bound_ok);
    EXPECT_LT(r.mass_drift, 1e-10);
    EXPECT_LT(r.max_principle_excess, 1e-6);
    EXPECT_GT(r.lhs, 0.0);
    for (std::size_t i = 1; i < s.norm_sq.size(); ++i) EXPECT_LE(s.norm_sq[i], s.norm_sq[i - 1] + 1e-15);
    EXPECT_EQ(r.min_span_eigenvalue, 0.0);
  }
}

TEST(Evolve, MismatchShrinksWithDt) {
  const TrigPoly u0 = TrigPoly::cosine({2, 0}) + 0.5 * TrigPoly::sine({1, 1});
  DensityOptions o;
  o.n = 32;
  o.T = 0.05;
  o.dt = 4e-4;
  const double coarse = energy_identity_report(sample(32, u0), kNoDrift, shear_basis(0.4), o).mismatch;
  o.dt = 2e-4;
  const double fine = energy_identity_report(sample(32, u0), kNoDrift, shear_basis(0.4), o).mismatch;
  EXPECT_LT(fine, coarse / 3.0);
}

TEST(Evolve, Errors) {
  DensityOptions o;
  o.n = 32;
  o.T = 0.01;
  o.dt = 1e-2;
  const auto u0 = sample(32, TrigPoly::cosine({1, 0}));
  EXPECT_THROW(evolve_density(u0, kNoDrift, heat_basis(1.0), o), CflViolation);
  o.enforce_cfl = false;
  o.T = 1.0;
  EXPECT_THROW(evolve_density(u0, kNoDrift, heat_basis(1.0), o), BlowUp);
  const TrigField compressible{TrigPoly::sine({1, 0}), TrigPoly::constant(0.0)};
  EXPECT_THROW(evolve_density(u0, compressible, heat_basis(0.01), o), std::invalid_argument);
  o.n = 8;
  EXPECT_THROW(evolve_density(sample(8, TrigPoly::cosine({1, 0})), kNoDrift, NoiseBasis::family(3.0, 12), o),
               std::invalid_argument);
}

SdeParams single_point_params(double dt, double T) {
  SdeParams p;
  p.kernel = {16, 1e-3};
  p.basis = NoiseBasis::family(3.0, 4);
  p.dt = dt;
  p.T = T;
  p.seed = 12;
  return p;
}

TEST(BackwardFlow, ConstantAndShortTime) {
  const auto ones = backward_flow_mc([](const VortexConfiguration&) { return 1.0; }, {Vec2{0.3, 0.3}}, {1.0}, {},
                                     single_point_params(1e-2, 0.1), 100);
  EXPECT_EQ(ones[0].mean, 1.0);
  EXPECT_EQ(ones[0].stderr_, 0.0);
  const TrigPoly v0 = TrigPoly::cosine({1, 0});
  const auto v = [&](const VortexConfiguration& c) { return v0(c.position(0).vec()); };
  const auto short_t = backward_flow_mc(v, {Vec2{0.1, 0.6}}, {1.0}, {}, single_point_params(1e-6, 1e-6), 200);
  EXPECT_NEAR(short_t[0].mean, v0(Vec2{0.1, 0.6}), 1e-3);
}

// With the two lowest modes Q(x, x) = 2 I, so the N = 1 lift is the heat
// equation with unit diffusivity.
TEST(BackwardFlow, SinglePointMatchesPde) {
  const TrigPoly v0 = TrigPoly::cosine({1, 0}) + 0.5 * TrigPoly::sine({1, 2});
  const double T = 0.05;
  DensityOptions o;
  o.n = 32;
  o.T = T;
  o.dt = 1e-4;
  const auto s = evolve_density(sample(32, v0), kNoDrift, NoiseBasis::family(3.0, 4), o);
  Fft2d fft(32);
  const auto coeffs = fft.forward(s.snapshots.back());
  const std::vector<Vec2> pts{{0.1, 0.2}, {0.55, 0.35}, {0.8, 0.9}};
  const auto est = backward_flow_mc([&](const VortexConfiguration& c) { return v0(c.position(0).vec()); }, pts, {1.0},
                                    {}, single_point_params(1e-3, T), 2000);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double pde = spectral_eval(coeffs, 32, pts[i]);
    const double heat = std::exp(-4.0 * kPi * kPi * T) * std::cos(kTwoPi * pts[i].x) +
                        0.5 * std::exp(-20.0 * kPi * kPi * T) * std::sin(kTwoPi * (pts[i].x + 2.0 * pts[i].y));
    EXPECT_NEAR(pde, heat, 1e-8);
    EXPECT_NEAR(est[i].mean, pde, 3.0 * est[i].stderr_) << "point " << i;
    EXPECT_EQ(est[i].aborted, 0u);
  }
}

}  // namespace
}  // namespace vlab
