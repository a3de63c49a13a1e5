// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vlab/cylinder.hpp"

namespace vlab {
namespace {

constexpr double kPi = std::numbers::pi;

const TrigPoly kCosX1 = TrigPoly::cosine({1, 0});
const TrigField kShear{TrigPoly::cosine({0, 1}), TrigPoly::constant(0.0)};  // (cos 2pi x2, 0)

struct Case {
  CylinderFunctional G;
  PointVorticity w;
  TrigField sigma;
};

TrigPoly random_test_function(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> k(-2, 2);
  std::normal_distribution<double> nd;
  TrigPoly p = TrigPoly::constant(0.3 * nd(gen));
  for (int r = 0; r < 3; ++r) {
    Mode m{k(gen), k(gen)};
    if (m.is_zero()) m = {1, 1};
    p += TrigPoly::wave(m, nd(gen), nd(gen));
  }
  return p;
}

CylinderFunctional random_functional(std::mt19937_64& gen, int kind) {
  std::normal_distribution<double> nd;
  std::vector<TrigPoly> phi{random_test_function(gen), random_test_function(gen)};
  switch (kind % 3) {
    case 0:
      return {OuterKind::kPolynomial,
              Polynomial(2, {{nd(gen), {1, 0}}, {nd(gen), {0, 2}}, {nd(gen), {1, 1}}, {0.2 * nd(gen), {3, 0}}}), phi};
    case 1: return {OuterKind::kTanh, Polynomial(2, {{0.5 * nd(gen), {1, 0}}, {0.5 * nd(gen), {1, 1}}}), phi, 1.5, 0.2};
    default: return {OuterKind::kExp, Polynomial::linear({0.3 * nd(gen), 0.3 * nd(gen)}, 0.1), phi, 0.8};
  }
}

TrigField random_field(std::mt19937_64& gen, int i) {
  static const auto basis = NoiseBasis::family(3.0, 8);
  if (i % 2 == 0) return basis.field(static_cast<std::size_t>(i / 2) % basis.size()).field;
  return perp_gradient(random_test_function(gen));
}

std::vector<Case> random_cases(int count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Case> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t N = 2 + static_cast<std::size_t>(i % 5);
    const auto w = sample_white_noise_vortices(N, seed, static_cast<std::uint32_t>(i));
    out.push_back({random_functional(gen, i), w, random_field(gen, i)});
  }
  return out;
}

TEST(GradientPairing, LinearIsIndependentOfOmega) {
  const auto G = CylinderFunctional::linear(kCosX1);
  const PointVorticity eta({2.0}, {TorusPoint(0.0, 0.3)});
  for (std::uint32_t i = 0; i < 3; ++i)
    EXPECT_NEAR(gradient_pairing(G, sample_white_noise_vortices(4, 1, i), eta), 2.0, 1e-15);
  EXPECT_EQ(gradient_pairing(G, eta, PointVorticity()), 0.0);
}

TEST(GradientPairing, MatchesDirectionalFiniteDifference) {
  const double eps = 1e-6;
  int i = 0;
  for (const auto& c : random_cases(20, 3)) {
    const auto eta = sample_white_noise_vortices(3, 99, static_cast<std::uint32_t>(i++));
    const double fd = (c.G(c.w + eta.scaled(eps)) - c.G(c.w + eta.scaled(-eps))) / (2 * eps);
    const double an = gradient_pairing(c.G, c.w, eta);
    EXPECT_LT(std::abs(an - fd) / std::max(1.0, std::abs(fd)), 1e-5);
  }
}

TEST(TransportPairing, HandEvaluatedShear) {
  const PointVorticity w({1.0}, {TorusPoint(0.25, 0.0)});
  EXPECT_NEAR(transport_pairing(CylinderFunctional::linear(kCosX1), w, kShear), 2.0 * kPi, 1e-12);
  EXPECT_EQ(transport_pairing(CylinderFunctional::constant(3.0), w, kShear), 0.0);
}

TEST(TransportPairing, FamilyFieldAnnihilatesItsOwnMode) {
  const auto basis = NoiseBasis::family(3.0, 12);
  const auto w = sample_white_noise_vortices(6, 2, 0);
  for (const auto& f : basis.fields()) {
    for (const auto& phi : {TrigPoly::cosine(f.mode), TrigPoly::sine(f.mode)}) {
      EXPECT_NEAR(transport_pairing(CylinderFunctional::linear(phi), w, f.field), 0.0, 1e-12);
      EXPECT_TRUE(f.field.directional(phi).is_zero(1e-12));
    }
  }
}

TEST(SecondTransport, HandEvaluatedShear) {
  const PointVorticity w({1.0}, {TorusPoint(0.0, 0.0)});
  EXPECT_NEAR(second_transport(CylinderFunctional::linear(kCosX1), w, kShear), -4.0 * kPi * kPi, 1e-10);
}

TEST(SecondTransport, PointwiseRouteMatchesExactComposition) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 10; ++i) {
    const auto phi = random_test_function(gen);
    const auto sigma = random_field(gen, i);
    const auto exact = sigma.directional(sigma.directional(phi));
    for (const Vec2 x : {Vec2{0.1, 0.2}, Vec2{0.77, 0.31}})
      EXPECT_NEAR(second_directional(sigma, phi, x), exact(x), 1e-9 * std::max(1.0, std::abs(exact(x))));
  }
}

TEST(SecondTransport, QuadraticHandExpansion) {
  // G = <w, phi>^2: 2 <w, phi> <w, s.grad(s.grad phi)> + 2 <w, s.grad phi>^2
  std::mt19937_64 gen(8);
  const auto phi = random_test_function(gen);
  const auto G = CylinderFunctional::product(phi, phi);
  const auto w = sample_white_noise_vortices(5, 3, 1);
  const auto s1 = kShear.directional(phi);
  const auto s2 = kShear.directional(s1);
  const double expected = 2.0 * w.pairing(phi) * w.pairing(s2) + 2.0 * std::pow(w.pairing(s1), 2);
  EXPECT_NEAR(second_transport(G, w, kShear), expected, 1e-10 * std::max(1.0, std::abs(expected)));
}

// The second-order identity: the left side composes two transport pairings
// through the derived functional, the right side uses the closed forms.
TEST(SecondTransport, OperatorIdentityOnRandomCases) {
  for (const auto& c : random_cases(20, 11)) {
    const TransportDerived H(c.G, c.sigma);
    EXPECT_NEAR(H(c.w), transport_pairing(c.G, c.w, c.sigma), 1e-12 * std::max(1.0, std::abs(H(c.w))));
    const double lhs = transport_pairing(H, c.w, c.sigma);
    const double rhs = second_transport(c.G, c.w, c.sigma);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(DriftPairing, SymmetricKernelFunction) {
  const BiotSavartKernel K(KernelSpec{16, 1e-3});
  std::mt19937_64 gen(2);
  const auto phi = random_test_function(gen);
  const Vec2 x{0.2, 0.9}, y{0.65, 0.4};
  EXPECT_EQ(h_phi(K, phi, x, y), h_phi(K, phi, y, x));
  EXPECT_EQ(h_phi(K, phi, x, x), 0.0);
}

TEST(DriftPairing, SingleVortexIsZero) {
  const BiotSavartKernel K(KernelSpec{16, 0.0});
  const PointVorticity w({1.7}, {TorusPoint(0.3, 0.3)});
  EXPECT_EQ(drift_pairing(CylinderFunctional::linear(kCosX1), w, K), 0.0);
}

TEST(DriftPairing, TwoVortexHandFormulaAndSwap) {
  const BiotSavartKernel K(KernelSpec{32, 1e-3});
  const VortexConfiguration c({1.3, -0.6}, {TorusPoint(0.2, 0.3), TorusPoint(0.6, 0.75)});
  const TrigPoly phi = TrigPoly::cosine({1, 1}) + TrigPoly::sine({0, 2});
  const Vec2 dg = phi.gradient(c.position(0).vec()) - phi.gradient(c.position(1).vec());
  const double expected = 0.5 * 1.3 * -0.6 * dot(K(c.position(0) - c.position(1)), dg);
  const auto G = CylinderFunctional::linear(phi);
  EXPECT_NEAR(drift_pairing(G, PointVorticity(c), K), expected, 1e-14);
  EXPECT_NEAR(drift_pairing(G, PointVorticity(c.permuted({1, 0})), K), expected, 1e-14);
}

TEST(DriftPairing, EqualsVelocityTransportOfTheDynamics) {
  // <w (x) w, H_phi> = sum_i w_i b_i . grad phi(X_i), b the point-vortex drift.
  SdeParams p;
  p.kernel = {16, 1e-3};
  const VortexSystem sys(p);
  const auto c = sample_white_noise_config(7, 4, 2);
  const PointVorticity w(c);
  const TrigPoly phi = TrigPoly::cosine({2, 1});
  const auto b = sys.drift(c);
  double direct = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) direct += w.weights()[i] * dot(b[i], phi.gradient(c.position(i).vec()));
  EXPECT_NEAR(quadratic_h(w, phi, sys.kernel()), direct, 1e-12);
  TimeCylinderFunctional F;
  F.add({{2.0}}, CylinderFunctional::linear(phi));
  EXPECT_NEAR(drift_pairing(F, 0.0, w, sys.kernel()), 2.0 * direct, 1e-12);
}

TEST(LiftedChainRule, OrientationIsCalibratedOnce) { EXPECT_EQ(lifted_chain_orientation(), -1.0); }

TEST(LiftedChainRule, ResidualsOnRandomCases) {
  const std::vector<double> a3{0.7, -1.1, 0.4};
  const std::vector<TorusPoint> x3{TorusPoint(0.1, 0.2), TorusPoint(0.5, 0.9), TorusPoint(0.8, 0.4)};
  EXPECT_EQ(lifted_chain_rule_residual(CylinderFunctional::constant(2.0), a3, x3, kShear).residual, 0.0);
  EXPECT_LT(lifted_chain_rule_residual(CylinderFunctional::linear(kCosX1), a3, x3, kShear).residual, 1e-6);

  std::mt19937_64 gen(21);
  const auto basis = NoiseBasis::family(3.0, 8);
  for (int i = 0; i < 20; ++i) {
    const auto G = CylinderFunctional::product(random_test_function(gen), random_test_function(gen));
    const auto c = sample_white_noise_config(5, 21, static_cast<std::uint32_t>(i));
    const auto r = lifted_chain_rule_residual(G, c.intensities(), c.positions(), basis.field(i % 8).field);
    EXPECT_LT(r.residual, 1e-5) << r.lhs << " vs " << r.rhs;
  }
}

TEST(WeakForm, FrozenSingleVortexHasZeroResidual) {
  SdeParams p;
  p.kernel = {16, 0.0};
  p.dt = 0.01;
  p.T = 0.5;
  const auto rec = simulate(VortexConfiguration({1.0}, {TorusPoint(0.3, 0.3)}), p);
  for (double r : weak_form_residual(rec, kCosX1, p)) EXPECT_EQ(r, 0.0);
}

TEST(WeakForm, BasisMismatchIsReported) {
  SdeParams p;
  p.basis = NoiseBasis::family(3.0, 4);
  p.dt = 0.01;
  p.T = 0.05;
  const auto rec = simulate(sample_white_noise_config(3, 1, 0), p);
  SdeParams q = p;
  q.basis = NoiseBasis::family(3.0, 6);
  EXPECT_THROW(weak_form_residual(rec, kCosX1, q), BasisMismatch);
}

TEST(WeakForm, DeterministicPairConvergesFirstOrder) {
  const VortexConfiguration c0({1.0, 0.7}, {TorusPoint(0.3, 0.4), TorusPoint(0.45, 0.5)});
  const TrigPoly phi = TrigPoly::cosine({1, 0}) + TrigPoly::sine({1, 1});
  double prev = 0.0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    SdeParams p;
    p.kernel = {32, 1e-3};
    p.dt = dt;
    p.T = 0.2;
    const double r = std::abs(weak_form_residual(simulate(c0, p), phi, p).back());
    if (prev > 0.0) {
      EXPECT_GE(prev / r, 1.8);
    }
    prev = r;
  }
}

TEST(DivergenceAnchor, MeanIsZeroWithinThreeStandardErrors) {
  std::mt19937_64 gen(31);
  const auto basis = NoiseBasis::family(3.0, 4);
  for (int i = 0; i < 4; ++i) {
    const auto G = random_functional(gen, i);
    const auto d = divergence_anchor(G, basis.field(static_cast<std::size_t>(i)).field, 8, 4000, 40 + i);
    EXPECT_LT(std::abs(d.z), 3.0) << d.mean << " +- " << d.stderr_;
  }
}

}  // namespace
}  // namespace vlab
