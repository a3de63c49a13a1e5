// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vlab/cylinder_functional.hpp"

namespace vlab {
namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<CylinderFunctional> catalog() {
  const TrigPoly c = TrigPoly::cosine({1, 0});
  const TrigPoly s = TrigPoly::sine({0, 1});
  const Polynomial quad(2, {{0.5, {2, 0}}, {-1.5, {1, 1}}, {0.25, {0, 3}}, {0.1, {0, 0}}});
  return {
      CylinderFunctional(OuterKind::kPolynomial, quad, {c, s}),
      CylinderFunctional(OuterKind::kTanh, quad, {c, s}, 2.0, 0.5),
      CylinderFunctional(OuterKind::kExp, Polynomial::linear({0.3, -0.8}, 0.2), {c, s}, 0.7),
  };
}

TEST(Polynomial, DerivativesMatchFiniteDifferences) {
  const Polynomial p(3, {{1.0, {2, 1, 0}}, {-2.0, {0, 0, 3}}, {0.5, {1, 1, 1}}, {4.0, {0, 0, 0}}});
  EXPECT_EQ(p.degree(), 3);
  const std::vector<double> z{0.3, -1.2, 0.7};
  const auto g = p.gradient(z);
  const auto h = p.hessian(z);
  const double eps = 1e-6;
  for (std::size_t a = 0; a < 3; ++a) {
    auto zp = z, zm = z;
    zp[a] += eps;
    zm[a] -= eps;
    EXPECT_LT(rel_err(g[a], (p(zp) - p(zm)) / (2 * eps)), 1e-6);
    const auto gp = p.gradient(zp), gm = p.gradient(zm);
    for (std::size_t b = 0; b < 3; ++b) EXPECT_LT(rel_err(h[b][a], (gp[b] - gm[b]) / (2 * eps)), 1e-6);
  }
  EXPECT_DOUBLE_EQ(p({0.0, 0.0, 0.0}), 4.0);
}

TEST(Polynomial, RejectsBadExponents) {
  EXPECT_THROW(Polynomial(2, {{1.0, {1}}}), std::invalid_argument);
  EXPECT_THROW(Polynomial(1, {{1.0, {-1}}}), std::invalid_argument);
}

TEST(CylinderFunctional, PartialsMatchFiniteDifferencesAtRandomArguments) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd;
  const double eps = 1e-6;
  for (const auto& G : catalog()) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<double> z{nd(gen), nd(gen)};
      const auto g = G.grad_g(z);
      const auto h = G.hess_g(z);
      for (std::size_t a = 0; a < 2; ++a) {
        auto zp = z, zm = z;
        zp[a] += eps;
        zm[a] -= eps;
        EXPECT_LT(rel_err(g[a], (G.g(zp) - G.g(zm)) / (2 * eps)), 1e-6) << to_string(G.kind());
        const auto gp = G.grad_g(zp), gm = G.grad_g(zm);
        for (std::size_t b = 0; b < 2; ++b)
          EXPECT_LT(rel_err(h[b][a], (gp[b] - gm[b]) / (2 * eps)), 1e-6) << to_string(G.kind());
      }
    }
  }
}

TEST(CylinderFunctional, EvaluatesAtPairings) {
  const auto G = catalog()[0];
  const PointVorticity w({0.5, -1.0}, {TorusPoint(0.0, 0.25), TorusPoint(0.5, 0.0)});
  // <w, cos 2pi x1> = 0.5 - (-1) * ... = 0.5*1 + (-1)*(-1) = 1.5; <w, sin 2pi x2> = 0.5
  const auto z = G.pairings(w);
  EXPECT_NEAR(z[0], 1.5, 1e-15);
  EXPECT_NEAR(z[1], 0.5, 1e-15);
  EXPECT_NEAR(G(w), 0.5 * 2.25 - 1.5 * 0.75 + 0.25 * 0.125 + 0.1, 1e-14);
}

TEST(CylinderFunctional, GrowthTags) {
  const auto cat = catalog();
  EXPECT_EQ(cat[0].growth(), "polynomial degree 3");
  EXPECT_EQ(cat[1].growth(), "bounded");
  EXPECT_EQ(cat[2].growth(), "exponential");
}

TEST(CylinderFunctional, JsonRoundTrip) {
  for (const auto& G : catalog()) {
    const auto H = CylinderFunctional::from_json(G.to_json());
    const PointVorticity w({0.8, 0.3}, {TorusPoint(0.1, 0.7), TorusPoint(0.6, 0.2)});
    EXPECT_DOUBLE_EQ(G(w), H(w));
  }
  const auto j = nlohmann::json::parse(R"({"outer": "exp_linear", "weights": [2.0], "bias": -1.0,
      "phi": [{"constant": 0.0, "terms": [{"k": [1, 0], "cos": 1.0, "sin": 0.0}]}]})");
  const auto E = CylinderFunctional::from_json(j);
  const PointVorticity w({1.0}, {TorusPoint(0.0, 0.0)});
  EXPECT_NEAR(E(w), std::exp(1.0), 1e-14);
  EXPECT_THROW(outer_kind_from_string("sigmoid"), std::invalid_argument);
}

TEST(CylinderFunctional, ArityMismatchRejected) {
  EXPECT_THROW(CylinderFunctional(OuterKind::kPolynomial, Polynomial::linear({1.0, 1.0}), {TrigPoly::constant(1.0)}),
               std::invalid_argument);
}

TEST(TimeCylinderFunctional, TimeDerivativeMatchesFiniteDifference) {
  TimeCylinderFunctional F;
  const auto cat = catalog();
  F.add({{1.0, -2.0, 0.5}}, cat[0]);
  F.add({{0.0, 0.0, 0.0, 3.0}}, cat[1]);
  const PointVorticity w({0.8, -0.3}, {TorusPoint(0.15, 0.4), TorusPoint(0.7, 0.9)});
  const double h = 1e-5;
  for (double t : {0.0, 0.3, 0.9}) {
    const double fd = (F(t + h, w) - F(t - h, w)) / (2 * h);
    EXPECT_NEAR(F.time_derivative(t, w), fd, 1e-8);
  }
}

TEST(TimeCylinderFunctional, TerminalZero) {
  TimeCylinderFunctional F;
  F.add({{1.0, 2.0}}, CylinderFunctional::linear(TrigPoly::cosine({1, 1})));
  EXPECT_FALSE(F.vanishes_at(1.0));
  EXPECT_THROW(F.require_terminal_zero(1.0), std::invalid_argument);
  const auto G = F.with_terminal_zero(1.0);
  EXPECT_TRUE(G.vanishes_at(1.0));
  EXPECT_NO_THROW(G.require_terminal_zero(1.0));
  const PointVorticity w({1.0}, {TorusPoint(0.2, 0.2)});
  EXPECT_NEAR(G(0.25, w), 0.75 * F(0.25, w), 1e-15);
}

}  // namespace
}  // namespace vlab
