// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Cylinder functionals G(omega) = g(<omega, phi_1>, ..., <omega, phi_n>) with
// g drawn from a small catalog (polynomial, tanh of a polynomial, exp of a
// polynomial) so first and second partials are available in closed form.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vlab/point_vorticity.hpp"
#include "vlab/trig_poly.hpp"

namespace vlab {

using Matrix = std::vector<std::vector<double>>;

/// Multivariate polynomial sum_m c_m prod_j z_j^{e_mj}.
class Polynomial {
 public:
  struct Monomial {
    double c = 0.0;
    std::vector<int> e;
  };

  Polynomial() = default;
  Polynomial(std::size_t n_vars, std::vector<Monomial> terms) : n_(n_vars), terms_(std::move(terms)) {
    for (const auto& m : terms_) {
      if (m.e.size() != n_) throw std::invalid_argument("Polynomial: exponent length mismatch");
      for (int e : m.e)
        if (e < 0) throw std::invalid_argument("Polynomial: negative exponent");
    }
  }

  /// sum_j w_j z_j + c
  static Polynomial linear(const std::vector<double>& w, double c = 0.0) {
    std::vector<Monomial> t;
    if (c != 0.0) t.push_back({c, std::vector<int>(w.size(), 0)});
    for (std::size_t j = 0; j < w.size(); ++j) {
      std::vector<int> e(w.size(), 0);
      e[j] = 1;
      t.push_back({w[j], e});
    }
    return {w.size(), t};
  }

  std::size_t n_vars() const { return n_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& m : terms_) {
      int s = 0;
      for (int e : m.e) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  double operator()(const std::vector<double>& z) const {
    double s = 0.0;
    for (const auto& m : terms_) {
      double p = m.c;
      for (std::size_t j = 0; j < n_; ++j) p *= ipow(z[j], m.e[j]);
      s += p;
    }
    return s;
  }

  std::vector<double> gradient(const std::vector<double>& z) const {
    std::vector<double> g(n_, 0.0);
    for (const auto& m : terms_) {
      for (std::size_t a = 0; a < n_; ++a) {
        if (m.e[a] == 0) continue;
        double p = m.c * m.e[a];
        for (std::size_t j = 0; j < n_; ++j) p *= ipow(z[j], m.e[j] - (j == a ? 1 : 0));
        g[a] += p;
      }
    }
    return g;
  }

  Matrix hessian(const std::vector<double>& z) const {
    Matrix h(n_, std::vector<double>(n_, 0.0));
    for (const auto& m : terms_) {
      for (std::size_t a = 0; a < n_; ++a) {
        for (std::size_t b = 0; b < n_; ++b) {
          std::vector<int> e = m.e;
          double p = m.c;
          p *= e[a];
          if (e[a] == 0) continue;
          --e[a];
          p *= e[b];
          if (e[b] == 0) continue;
          --e[b];
          for (std::size_t j = 0; j < n_; ++j) p *= ipow(z[j], e[j]);
          h[a][b] += p;
        }
      }
    }
    return h;
  }

 private:
  static double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
  }

  std::size_t n_ = 0;
  std::vector<Monomial> terms_;
};

enum class OuterKind { kPolynomial, kTanh, kExp };

inline std::string to_string(OuterKind k) {
  switch (k) {
    case OuterKind::kPolynomial: return "polynomial";
    case OuterKind::kTanh: return "tanh";
    case OuterKind::kExp: return "exp";
  }
  return "polynomial";
}

inline OuterKind outer_kind_from_string(const std::string& s) {
  if (s == "polynomial") return OuterKind::kPolynomial;
  if (s == "tanh") return OuterKind::kTanh;
  if (s == "exp" || s == "exp_linear") return OuterKind::kExp;
  throw std::invalid_argument("unknown outer function: " + s);
}

/// g(z) = offset + scale * F(P(z)) with F in {identity, tanh, exp}.
class CylinderFunctional {
 public:
  CylinderFunctional() = default;
  CylinderFunctional(OuterKind kind, Polynomial poly, std::vector<TrigPoly> phi, double scale = 1.0, double offset = 0.0)
      : kind_(kind), poly_(std::move(poly)), phi_(std::move(phi)), scale_(scale), offset_(offset) {
    if (poly_.n_vars() != phi_.size()) throw std::invalid_argument("CylinderFunctional: arity mismatch");
  }

  static CylinderFunctional constant(double c) { return {OuterKind::kPolynomial, Polynomial(0, {{c, {}}}), {}}; }
  /// <omega, phi>
  static CylinderFunctional linear(const TrigPoly& phi) {
    return {OuterKind::kPolynomial, Polynomial::linear({1.0}), {phi}};
  }
  /// <omega, phi1> <omega, phi2>
  static CylinderFunctional product(const TrigPoly& phi1, const TrigPoly& phi2) {
    return {OuterKind::kPolynomial, Polynomial(2, {{1.0, {1, 1}}}), {phi1, phi2}};
  }

  OuterKind kind() const { return kind_; }
  const Polynomial& poly() const { return poly_; }
  const std::vector<TrigPoly>& tests() const { return phi_; }
  std::size_t arity() const { return phi_.size(); }
  double scale() const { return scale_; }
  double offset() const { return offset_; }

  /// Growth class of the outer function.
  std::string growth() const {
    switch (kind_) {
      case OuterKind::kPolynomial: return "polynomial degree " + std::to_string(poly_.degree());
      case OuterKind::kTanh: return "bounded";
      case OuterKind::kExp: return "exponential";
    }
    return "";
  }

  std::vector<double> pairings(const PointVorticity& w) const {
    std::vector<double> z(phi_.size());
    for (std::size_t j = 0; j < phi_.size(); ++j) z[j] = w.pairing(phi_[j]);
    return z;
  }

  double g(const std::vector<double>& z) const { return offset_ + scale_ * f0(poly_(z)); }

  std::vector<double> grad_g(const std::vector<double>& z) const {
    auto gp = poly_.gradient(z);
    const double d = scale_ * f1(poly_(z));
    for (double& v : gp) v *= d;
    return gp;
  }

  Matrix hess_g(const std::vector<double>& z) const {
    const double p = poly_(z);
    const auto gp = poly_.gradient(z);
    Matrix h = poly_.hessian(z);
    const double d1 = scale_ * f1(p);
    const double d2 = scale_ * f2(p);
    for (std::size_t a = 0; a < h.size(); ++a)
      for (std::size_t b = 0; b < h.size(); ++b) h[a][b] = d1 * h[a][b] + d2 * gp[a] * gp[b];
    return h;
  }

  double operator()(const PointVorticity& w) const { return g(pairings(w)); }

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& m : poly_.terms()) terms.push_back({{"c", m.c}, {"e", m.e}});
    nlohmann::json phis = nlohmann::json::array();
    for (const auto& p : phi_) phis.push_back(p.to_json());
    return {{"outer", to_string(kind_)}, {"scale", scale_}, {"offset", offset_}, {"terms", terms}, {"phi", phis}};
  }

  static CylinderFunctional from_json(const nlohmann::json& j) {
    std::vector<TrigPoly> phi;
    for (const auto& p : j.at("phi")) phi.push_back(TrigPoly::from_json(p));
    std::vector<Polynomial::Monomial> terms;
    if (j.contains("terms")) {
      for (const auto& t : j.at("terms")) terms.push_back({t.at("c").get<double>(), t.at("e").get<std::vector<int>>()});
    } else if (j.contains("weights")) {
      // exp_linear / tanh shorthand: P(z) = w.z + bias
      return {outer_kind_from_string(j.at("outer").get<std::string>()),
              Polynomial::linear(j.at("weights").get<std::vector<double>>(), j.value("bias", 0.0)), phi,
              j.value("scale", 1.0), j.value("offset", 0.0)};
    }
    return {outer_kind_from_string(j.at("outer").get<std::string>()), Polynomial(phi.size(), terms), phi,
            j.value("scale", 1.0), j.value("offset", 0.0)};
  }

 private:
  double f0(double p) const {
    switch (kind_) {
      case OuterKind::kTanh: return std::tanh(p);
      case OuterKind::kExp: return std::exp(p);
      default: return p;
    }
  }
  double f1(double p) const {
    switch (kind_) {
      case OuterKind::kTanh: {
        const double t = std::tanh(p);
        return 1.0 - t * t;
      }
      case OuterKind::kExp: return std::exp(p);
      default: return 1.0;
    }
  }
  double f2(double p) const {
    switch (kind_) {
      case OuterKind::kTanh: {
        const double t = std::tanh(p);
        return -2.0 * t * (1.0 - t * t);
      }
      case OuterKind::kExp: return std::exp(p);
      default: return 0.0;
    }
  }

  OuterKind kind_ = OuterKind::kPolynomial;
  Polynomial poly_;
  std::vector<TrigPoly> phi_;
  double scale_ = 1.0;
  double offset_ = 0.0;
};

/// Polynomial in t with exact derivative.
struct TimePolynomial {
  std::vector<double> c;  // c[0] + c[1] t + ...

  double operator()(double t) const {
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * t + c[i];
    return s;
  }
  double derivative(double t) const {
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) s = s * t + static_cast<double>(i) * c[i];
    return s;
  }
  /// Multiply by (T - t).
  TimePolynomial times_terminal_factor(double T) const {
    TimePolynomial r;
    r.c.assign(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      r.c[i] += T * c[i];
      r.c[i + 1] -= c[i];
    }
    return r;
  }
};

/// F(t, omega) = sum_i g_i(t) f_i(omega)
class TimeCylinderFunctional {
 public:
  void add(TimePolynomial g, CylinderFunctional f) { terms_.emplace_back(std::move(g), std::move(f)); }
  const std::vector<std::pair<TimePolynomial, CylinderFunctional>>& terms() const { return terms_; }

  double operator()(double t, const PointVorticity& w) const {
    double s = 0.0;
    for (const auto& [g, f] : terms_) s += g(t) * f(w);
    return s;
  }
  double time_derivative(double t, const PointVorticity& w) const {
    double s = 0.0;
    for (const auto& [g, f] : terms_) s += g.derivative(t) * f(w);
    return s;
  }

  bool vanishes_at(double T, double tol = 1e-14) const {
    for (const auto& [g, f] : terms_)
      if (std::abs(g(T)) > tol) return false;
    return true;
  }

  /// Copy whose time factors carry (T - t), so F(T, .) = 0.
  TimeCylinderFunctional with_terminal_zero(double T) const {
    TimeCylinderFunctional r;
    for (const auto& [g, f] : terms_) r.add(g.times_terminal_factor(T), f);
    return r;
  }

  /// Throws unless F(T, .) = 0, as required of continuity-equation test functions.
  void require_terminal_zero(double T) const {
    if (!vanishes_at(T)) throw std::invalid_argument("TimeCylinderFunctional: F(T, .) must vanish");
  }

 private:
  std::vector<std::pair<TimePolynomial, CylinderFunctional>> terms_;
};

}  // namespace vlab
