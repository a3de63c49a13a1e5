// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Functional calculus on cylinder functionals evaluated at point vorticities:
// directional derivatives, transport and drift pairings, the second-order
// transport identity, the lifted chain rule and the weak-form residual.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlab/cylinder_functional.hpp"
#include "vlab/noise_model.hpp"
#include "vlab/point_vorticity.hpp"
#include "vlab/stats.hpp"
#include "vlab/torus_spectral.hpp"
#include "vlab/trig_poly.hpp"
#include "vlab/vortex_dynamics.hpp"
#include "vlab/white_noise.hpp"

namespace vlab {

/// <eta, D_omega G(omega)> = sum_j d_j g(<omega, Phi>) <eta, phi_j>
template <class F>
double gradient_pairing(const F& G, const PointVorticity& w, const PointVorticity& eta) {
  const auto& phi = G.tests();
  std::vector<double> z(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) z[j] = w.pairing(phi[j]);
  const auto dg = G.grad_g(z);
  double s = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) s += dg[j] * eta.pairing(phi[j]);
  return s;
}

/// <sigma.grad omega, D_omega G> := -sum_j d_j g(<omega, Phi>) <omega, sigma.grad phi_j>
template <class F>
double transport_pairing(const F& G, const PointVorticity& w, const TrigField& sigma) {
  const auto& phi = G.tests();
  std::vector<double> z(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) z[j] = w.pairing(phi[j]);
  const auto dg = G.grad_g(z);
  double s = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (dg[j] == 0.0) continue;
    s -= dg[j] * w.pair([&](const Vec2& x) { return dot(sigma(x), phi[j].gradient(x)); });
  }
  return s;
}

/// sigma.grad(sigma.grad phi)(x) = sigma^T Hess(phi) sigma + ((sigma.grad) sigma).grad phi, pointwise.
inline double second_directional(const TrigField& sigma, const TrigPoly& phi, const Vec2& x) {
  const Vec2 s = sigma(x);
  const Mat2 h = phi.hessian(x);
  const Vec2 adv = sigma.jacobian(x) * s;
  return dot(s, h * s) + dot(adv, phi.gradient(x));
}

/// sum_j d_j g <omega, sigma.grad(sigma.grad phi_j)> + sum_{j,l} d_jl g <omega, sigma.grad phi_j><omega, sigma.grad phi_l>
inline double second_transport(const CylinderFunctional& G, const PointVorticity& w, const TrigField& sigma) {
  const auto& phi = G.tests();
  const std::size_t n = phi.size();
  const auto z = G.pairings(w);
  const auto dg = G.grad_g(z);
  const auto hg = G.hess_g(z);
  std::vector<double> first(n);
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    first[j] = w.pair([&](const Vec2& x) { return dot(sigma(x), phi[j].gradient(x)); });
    s += dg[j] * w.pair([&](const Vec2& x) { return second_directional(sigma, phi[j], x); });
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) s += hg[j][l] * first[j] * first[l];
  return s;
}

/// H(omega) = <sigma.grad omega, D_omega G> as a cylinder functional in its own
/// right: tests (phi_1..phi_n, sigma.grad phi_1..sigma.grad phi_n) and outer
/// h(y, z) = -sum_j d_j g(y) z_j.
class TransportDerived {
 public:
  TransportDerived(CylinderFunctional G, const TrigField& sigma) : G_(std::move(G)) {
    tests_ = G_.tests();
    for (const auto& p : G_.tests()) tests_.push_back(sigma.directional(p));
  }

  const std::vector<TrigPoly>& tests() const { return tests_; }

  double g(const std::vector<double>& yz) const {
    const std::size_t n = G_.arity();
    const std::vector<double> y(yz.begin(), yz.begin() + static_cast<std::ptrdiff_t>(n));
    const auto dg = G_.grad_g(y);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s -= dg[j] * yz[n + j];
    return s;
  }

  std::vector<double> grad_g(const std::vector<double>& yz) const {
    const std::size_t n = G_.arity();
    const std::vector<double> y(yz.begin(), yz.begin() + static_cast<std::ptrdiff_t>(n));
    const auto dg = G_.grad_g(y);
    const auto hg = G_.hess_g(y);
    std::vector<double> out(2 * n, 0.0);
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t j = 0; j < n; ++j) out[l] -= hg[j][l] * yz[n + j];
    for (std::size_t j = 0; j < n; ++j) out[n + j] = -dg[j];
    return out;
  }

  double operator()(const PointVorticity& w) const {
    std::vector<double> yz(tests_.size());
    for (std::size_t a = 0; a < tests_.size(); ++a) yz[a] = w.pairing(tests_[a]);
    return g(yz);
  }

 private:
  CylinderFunctional G_;
  std::vector<TrigPoly> tests_;
};

/// H_phi(x, y) = 1/2 K(x - y).(grad phi(x) - grad phi(y)); zero on the diagonal.
inline double h_phi(const BiotSavartKernel& K, const TrigPoly& phi, const Vec2& x, const Vec2& y) {
  if (x.x == y.x && x.y == y.y) return 0.0;
  return 0.5 * dot(K(min_image(x - y)), phi.gradient(x) - phi.gradient(y));
}

/// <omega (x) omega, H_phi>, summed over unordered pairs.
inline double quadratic_h(const PointVorticity& w, const TrigPoly& phi, const BiotSavartKernel& K) {
  const auto& a = w.atoms();
  const auto& c = w.weights();
  std::vector<Vec2> grad(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) grad[i] = phi.gradient(a[i].vec());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a[i].vec().x == a[j].vec().x && a[i].vec().y == a[j].vec().y) continue;
      s += c[i] * c[j] * dot(K(a[i] - a[j]), grad[i] - grad[j]);
    }
  return s;
}

/// <b(omega), D_omega G> = sum_j d_j g <omega (x) omega, H_{phi_j}>
inline double drift_pairing(const CylinderFunctional& G, const PointVorticity& w, const BiotSavartKernel& K) {
  const auto z = G.pairings(w);
  const auto dg = G.grad_g(z);
  double s = 0.0;
  for (std::size_t j = 0; j < dg.size(); ++j)
    if (dg[j] != 0.0) s += dg[j] * quadratic_h(w, G.tests()[j], K);
  return s;
}

inline double drift_pairing(const TimeCylinderFunctional& F, double t, const PointVorticity& w,
                            const BiotSavartKernel& K) {
  double s = 0.0;
  for (const auto& [g, f] : F.terms()) s += g(t) * drift_pairing(f, w, K);
  return s;
}

namespace detail {

/// d/d eps G(T_N(a, x + eps A(x))) by central differences.
inline double lifted_directional_fd(const CylinderFunctional& G, const std::vector<double>& a,
                                    const std::vector<TorusPoint>& x, const TrigField& sigma, double h) {
  std::vector<TorusPoint> xp(x.size()), xm(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec2 s = sigma(x[i]);
    xp[i] = x[i].shifted(h * s);
    xm[i] = x[i].shifted(-h * s);
  }
  const VortexConfiguration cp(a, xp), cm(a, xm);
  return (G(PointVorticity(cp)) - G(PointVorticity(cm))) / (2.0 * h);
}

}  // namespace detail

/// Sign s with LHS = s * transport_pairing, fixed once on the linear case.
inline double lifted_chain_orientation() {
  static const double s = [] {
    const TrigPoly phi = TrigPoly::cosine(Mode{1, 0});
    const TrigField sigma{TrigPoly::cosine(Mode{0, 1}), TrigPoly::constant(0.0)};
    const std::vector<double> a{1.0};
    const std::vector<TorusPoint> x{TorusPoint(0.25, 0.0)};
    const auto G = CylinderFunctional::linear(phi);
    const double lhs = detail::lifted_directional_fd(G, a, x, sigma, 1e-6);
    const double rhs = transport_pairing(G, PointVorticity(VortexConfiguration(a, x)), sigma);
    return std::abs(lhs - rhs) <= std::abs(lhs + rhs) ? 1.0 : -1.0;
  }();
  return s;
}

struct LiftedChainResult {
  double lhs = 0.0;
  double rhs = 0.0;  // orientation * transport_pairing
  double orientation = 0.0;
  double residual = 0.0;
};

/// |A(x).grad_{2N}(G o T_N)(a, x) - s <sigma.grad omega, D_omega G>| with the
/// left side by central differences of step h.
inline LiftedChainResult lifted_chain_rule_residual(const CylinderFunctional& G, const std::vector<double>& a,
                                                    const std::vector<TorusPoint>& x, const TrigField& sigma,
                                                    double h = 1e-6) {
  LiftedChainResult r;
  r.orientation = lifted_chain_orientation();
  r.lhs = detail::lifted_directional_fd(G, a, x, sigma, h);
  r.rhs = r.orientation * transport_pairing(G, PointVorticity(VortexConfiguration(a, x)), sigma);
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

struct BasisMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// R(t_n) along a recorded trajectory, left-point quadrature and recorded increments.
inline std::vector<double> weak_form_residual(const TrajectoryRecord& rec, const TrigPoly& phi, const SdeParams& params) {
  const auto& basis = params.basis;
  if (rec.m_noise != basis.size())
    throw BasisMismatch("weak_form_residual: record has " + std::to_string(rec.m_noise) + " noise fields, basis has " +
                        std::to_string(basis.size()));
  const BiotSavartKernel K(params.kernel);
  std::vector<TrigPoly> first;
  TrigPoly second;
  for (const auto& f : basis.fields()) {
    first.push_back(f.field.directional(phi));
    second += f.field.directional(first.back());
  }
  second *= 0.5;
  const double dt = params.dt;
  std::vector<double> R(rec.states.size(), 0.0);
  if (rec.states.empty()) return R;
  const double y0 = PointVorticity(rec.states[0]).pairing(phi);
  double acc = 0.0;
  for (std::size_t n = 0; n + 1 < rec.states.size(); ++n) {
    const PointVorticity w(rec.states[n]);
    acc += quadratic_h(w, phi, K) * dt + w.pairing(second) * dt;
    const auto dW = rec.increments(n);
    for (std::size_t j = 0; j < first.size(); ++j) acc += w.pairing(first[j]) * dW[j];
    R[n + 1] = PointVorticity(rec.states[n + 1]).pairing(phi) - y0 - acc;
  }
  return R;
}

struct DivergenceAnchor {
  double mean = 0.0;
  double stderr_ = 0.0;
  double z = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo average of <sigma.grad omega, D_omega G> over white-noise point
/// vorticities of size N.
inline DivergenceAnchor divergence_anchor(const CylinderFunctional& G, const TrigField& sigma, std::size_t N,
                                          std::size_t samples, std::uint64_t seed, int threads = 0) {
  const auto vals = parallel_map(
      samples,
      [&](std::size_t i) {
        return transport_pairing(G, sample_white_noise_vortices(N, seed, static_cast<std::uint32_t>(i)), sigma);
      },
      threads);
  stats::RunningStats s;
  for (double v : vals) s.add(v);
  DivergenceAnchor d;
  d.mean = s.mean();
  d.stderr_ = s.stderr_mean();
  d.z = d.stderr_ > 0.0 ? d.mean / d.stderr_ : 0.0;
  d.samples = s.count();
  return d;
}

}  // namespace vlab
