// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Finite real Fourier sums on the unit torus and vector fields built from
// them. Every derivative and product stays inside the class, so identities
// between differential operators can be checked without interpolation error.

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

#include "vlab/torus.hpp"

namespace vlab {

using cplx = std::complex<double>;

/// f(x) = sum_k c_k exp(2 pi i k.x) with c_{-k} = conj(c_k), so f is real.
class TrigPoly {
 public:
  using CoeffMap = std::map<Mode, cplx>;

  TrigPoly() = default;

  static TrigPoly constant(double c) {
    TrigPoly p;
    if (c != 0.0) p.coeffs_[Mode{0, 0}] = c;
    return p;
  }

  /// a cos(2 pi k.x) + b sin(2 pi k.x)
  static TrigPoly wave(Mode k, double a, double b) {
    TrigPoly p;
    if (k.is_zero()) return constant(a);
    // a cos + b sin = Re[(a - i b) e^{i theta}] -> c_k = (a - i b)/2
    const cplx ck{0.5 * a, -0.5 * b};
    p.add_coeff(k, ck);
    p.add_coeff(-k, std::conj(ck));
    return p;
  }
  static TrigPoly cosine(Mode k, double amp = 1.0) { return wave(k, amp, 0.0); }
  static TrigPoly sine(Mode k, double amp = 1.0) { return wave(k, 0.0, amp); }

  /// Build from raw coefficients; throws if conjugate symmetry fails.
  static TrigPoly from_coeffs(CoeffMap coeffs, double tol = 1e-12) {
    TrigPoly p;
    p.coeffs_ = std::move(coeffs);
    if (!p.is_real(tol)) throw std::invalid_argument("TrigPoly: coefficients are not conjugate-symmetric");
    return p;
  }

  const CoeffMap& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }

  cplx coeff(const Mode& k) const {
    const auto it = coeffs_.find(k);
    return it == coeffs_.end() ? cplx{} : it->second;
  }

  /// Largest |k|_inf present.
  int bandwidth() const {
    int b = 0;
    for (const auto& [k, c] : coeffs_) b = std::max(b, k.sup_norm());
    return b;
  }

  bool is_real(double tol = 1e-12) const {
    for (const auto& [k, c] : coeffs_) {
      if (std::abs(c - std::conj(coeff(-k))) > tol * std::max(1.0, std::abs(c))) return false;
    }
    return true;
  }

  double operator()(const Vec2& x) const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) {
      const double th = phase(k, x);
      s += c.real() * std::cos(th) - c.imag() * std::sin(th);
    }
    return s;
  }
  double operator()(const TorusPoint& x) const { return (*this)(x.vec()); }

  Vec2 gradient(const Vec2& x) const {
    Vec2 g;
    for (const auto& [k, c] : coeffs_) {
      const double th = phase(k, x);
      // d/dx_m of Re[c e^{i th}] = -2 pi k_m Im[c e^{i th}]
      const double im = c.real() * std::sin(th) + c.imag() * std::cos(th);
      g.x -= kTwoPi * k.k1 * im;
      g.y -= kTwoPi * k.k2 * im;
    }
    return g;
  }
  Vec2 gradient(const TorusPoint& x) const { return gradient(x.vec()); }

  Mat2 hessian(const Vec2& x) const {
    Mat2 h;
    for (const auto& [k, c] : coeffs_) {
      const double th = phase(k, x);
      const double re = c.real() * std::cos(th) - c.imag() * std::sin(th);
      const double f = -kTwoPi * kTwoPi * re;
      h(0, 0) += f * k.k1 * k.k1;
      h(0, 1) += f * k.k1 * k.k2;
      h(1, 1) += f * k.k2 * k.k2;
    }
    h(1, 0) = h(0, 1);
    return h;
  }
  Mat2 hessian(const TorusPoint& x) const { return hessian(x.vec()); }

  /// Partial derivative along axis 0 (x1) or 1 (x2).
  TrigPoly derivative(int axis) const {
    TrigPoly d;
    for (const auto& [k, c] : coeffs_) {
      const int km = axis == 0 ? k.k1 : k.k2;
      if (km != 0) d.coeffs_[k] = cplx{0.0, kTwoPi * km} * c;
    }
    return d;
  }

  /// Integral over the torus (the zero mode).
  double mean() const { return coeff(Mode{0, 0}).real(); }

  /// L^2 norm squared via Parseval.
  double l2_norm_sq() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::norm(c);
    return s;
  }

  /// sum |c_k|, an upper bound on the sup norm.
  double l1_coeff_norm() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::abs(c);
    return s;
  }

  /// Drop coefficients with |c| <= tol.
  TrigPoly& prune(double tol = 0.0) {
    std::erase_if(coeffs_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    return *this;
  }

  bool is_zero(double tol = 0.0) const {
    for (const auto& [k, c] : coeffs_)
      if (std::abs(c) > tol) return false;
    return true;
  }

  TrigPoly& operator+=(const TrigPoly& o) {
    for (const auto& [k, c] : o.coeffs_) add_coeff(k, c);
    return *this;
  }
  TrigPoly& operator-=(const TrigPoly& o) {
    for (const auto& [k, c] : o.coeffs_) add_coeff(k, -c);
    return *this;
  }
  TrigPoly& operator*=(double s) {
    for (auto& [k, c] : coeffs_) c *= s;
    return *this;
  }
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator*(double s, TrigPoly a) { return a *= s; }
  friend TrigPoly operator*(TrigPoly a, double s) { return a *= s; }

  /// Pointwise product (coefficient convolution).
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    TrigPoly p;
    for (const auto& [ka, ca] : a.coeffs_)
      for (const auto& [kb, cb] : b.coeffs_) p.add_coeff(ka + kb, ca * cb);
    return p;
  }

  /// Descriptor: {"constant": c, "terms": [{"k": [k1,k2], "cos": a, "sin": b}, ...]}
  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, c] : coeffs_) {
      if (!k.in_half_lattice()) continue;
      // c_k e^{i th} + conj -> 2 Re c cos - 2 Im c sin
      terms.push_back({{"k", {k.k1, k.k2}}, {"cos", 2.0 * c.real()}, {"sin", -2.0 * c.imag()}});
    }
    return {{"constant", mean()}, {"terms", terms}};
  }

  static TrigPoly from_json(const nlohmann::json& j) {
    TrigPoly p = constant(j.value("constant", 0.0));
    if (j.contains("terms")) {
      for (const auto& t : j.at("terms")) {
        const auto k = t.at("k");
        p += wave(Mode{k.at(0).get<int>(), k.at(1).get<int>()}, t.value("cos", 0.0), t.value("sin", 0.0));
      }
    }
    return p;
  }

 private:
  void add_coeff(const Mode& k, cplx c) {
    auto [it, inserted] = coeffs_.try_emplace(k, c);
    if (!inserted) it->second += c;
  }

  CoeffMap coeffs_;
};

/// Vector field with TrigPoly components.
struct TrigField {
  TrigPoly u;  // first component
  TrigPoly v;  // second component

  static TrigField constant(const Vec2& c) { return {TrigPoly::constant(c.x), TrigPoly::constant(c.y)}; }

  Vec2 operator()(const Vec2& x) const { return {u(x), v(x)}; }
  Vec2 operator()(const TorusPoint& x) const { return (*this)(x.vec()); }

  /// J(r, c) = d(component r)/d x_c
  Mat2 jacobian(const Vec2& x) const {
    const Vec2 gu = u.gradient(x);
    const Vec2 gv = v.gradient(x);
    return Mat2{{{{gu.x, gu.y}, {gv.x, gv.y}}}};
  }

  TrigPoly divergence() const { return u.derivative(0) + v.derivative(1); }

  bool is_divergence_free(double tol = 1e-12) const { return divergence().is_zero(tol); }

  /// The scalar sigma . grad(phi), exactly.
  TrigPoly directional(const TrigPoly& phi) const { return u * phi.derivative(0) + v * phi.derivative(1); }

  /// sigma . grad(sigma), exactly.
  TrigField self_advection() const { return {directional(u), directional(v)}; }

  int bandwidth() const { return std::max(u.bandwidth(), v.bandwidth()); }

  TrigField& operator*=(double s) {
    u *= s;
    v *= s;
    return *this;
  }
  TrigField& operator+=(const TrigField& o) {
    u += o.u;
    v += o.v;
    return *this;
  }
  friend TrigField operator*(double s, TrigField f) { return f *= s; }
  friend TrigField operator+(TrigField a, const TrigField& b) { return a += b; }

  nlohmann::json to_json() const { return {{"u", u.to_json()}, {"v", v.to_json()}}; }
  static TrigField from_json(const nlohmann::json& j) {
    return {TrigPoly::from_json(j.at("u")), TrigPoly::from_json(j.at("v"))};
  }
};

/// Divergence-free field from a stream function: (d2 psi, -d1 psi).
inline TrigField perp_gradient(const TrigPoly& stream) {
  return {stream.derivative(1), -1.0 * stream.derivative(0)};
}

}  // namespace vlab
