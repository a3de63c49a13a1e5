// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Fourier-side tools on the unit torus: the periodic Biot-Savart kernel,
// velocities induced by point vortices, and Fourier coefficients of point
// vorticities.
//
// Convention: K = grad_perp (-Laplace)^{-1} (delta_0 - 1), grad_perp = (d2, -d1),
//   K^(k) = i k_perp / (2 pi |k|^2) exp(-4 pi^2 delta |k|^2),  k_perp = (k2, -k1).
// With it d1 K2 - d2 K1 = delta_0 - 1 (heat-damped when delta > 0).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vlab/configuration.hpp"
#include "vlab/torus.hpp"
#include "vlab/trig_poly.hpp"

namespace vlab {

/// Written into every report so downstream users can convert constants.
struct ConventionRecord {
  std::string k_perp = "(k2, -k1)";
  std::string kernel_coeff = "i k_perp / (2 pi |k|^2) * exp(-4 pi^2 delta |k|^2)";
  std::string green_function = "(-Laplace)^{-1} with eigenvalue 4 pi^2 |k|^2";
  std::string curl = "d1 K2 - d2 K1 = delta_0 - 1";
  std::string noise_convolution = "(sigma_k * K)(x) = i e_k(x) / (2 pi |k|^gamma)";
  std::string noise_convolution_alt = "alternative normalization 2 pi i e_k(x) / |k|^gamma (not used)";

  nlohmann::json to_json() const {
    return {{"k_perp", k_perp},
            {"kernel_coeff", kernel_coeff},
            {"green_function", green_function},
            {"curl", curl},
            {"noise_convolution", noise_convolution},
            {"noise_convolution_alt", noise_convolution_alt}};
  }
};

struct KernelSpec {
  int M = 64;          // truncation |k|_inf <= M
  double delta = 0.0;  // heat-kernel mollification time
  ConventionRecord convention{};

  void validate() const {
    if (M < 1) throw std::invalid_argument("KernelSpec: cutoff M must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("KernelSpec: delta must be >= 0");
  }

  double damping(const Mode& k) const {
    return delta > 0.0 ? std::exp(-4.0 * std::numbers::pi * std::numbers::pi * delta * static_cast<double>(k.norm_sq()))
                       : 1.0;
  }

  nlohmann::json to_json() const { return {{"M", M}, {"delta", delta}, {"convention", convention.to_json()}}; }
};

using CVec2 = std::array<cplx, 2>;

inline CVec2 biot_savart_coeff(const Mode& k, const KernelSpec& spec) {
  if (k.is_zero()) return {cplx{}, cplx{}};
  const double scale = spec.damping(k) / (kTwoPi * static_cast<double>(k.norm_sq()));
  const Vec2 kp = k.perp();
  return {cplx{0.0, kp.x * scale}, cplx{0.0, kp.y * scale}};
}

/// Coefficients over 0 < |k|_inf <= M.
struct FourierCoeffTable {
  int M = 0;
  std::map<Mode, cplx> coeffs;

  cplx at(const Mode& k) const {
    const auto it = coeffs.find(k);
    return it == coeffs.end() ? cplx{} : it->second;
  }

  bool conjugate_symmetric(double tol = 1e-12) const {
    for (const auto& [k, c] : coeffs)
      if (std::abs(c - std::conj(at(-k))) > tol) return false;
    return true;
  }

  /// [[k1, k2, re, im], ...]
  nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [k, c] : coeffs) a.push_back({k.k1, k.k2, c.real(), c.imag()});
    return a;
  }

  static FourierCoeffTable from_json(const nlohmann::json& a) {
    FourierCoeffTable t;
    for (const auto& e : a) {
      const Mode k{e.at(0).get<int>(), e.at(1).get<int>()};
      if (k.is_zero()) throw std::invalid_argument("FourierCoeffTable: mode (0,0) is excluded");
      t.coeffs[k] = cplx{e.at(2).get<double>(), e.at(3).get<double>()};
      t.M = std::max(t.M, k.sup_norm());
    }
    return t;
  }
};

/// Fast evaluator for the truncated (and optionally mollified) kernel.
///
/// Summing +k and -k together and splitting the phase gives the separable
/// real forms
///   K1(x) = -(1/pi) sum_{a>=0, b>=1} w(a) b G(a,b) cos(2 pi a x1) sin(2 pi b x2)
///   K2(x) = +(1/pi) sum_{a>=1, b>=0} w(b) a G(a,b) sin(2 pi a x1) cos(2 pi b x2)
/// with G = damping / (a^2 + b^2), w(0) = 1, w(>0) = 2. K1 is odd in x2 and
/// even in x1 (K2 the reverse), so evaluating at |x| and restoring signs
/// makes K(-x) = -K(x) hold bit for bit.
class BiotSavartKernel {
 public:
  explicit BiotSavartKernel(KernelSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    m_ = spec_.M;
    if (spec_.delta > 0.0) {
      // Beyond this radius every damping factor is below 1e-20.
      const double r = std::sqrt(46.0 / (4.0 * std::numbers::pi * std::numbers::pi * spec_.delta));
      m_ = std::min(m_, static_cast<int>(std::ceil(r)) + 1);
    }
    const int n = m_ + 1;
    c1_.assign(static_cast<std::size_t>(n * n), 0.0);
    c2_.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int a = 0; a <= m_; ++a) {
      for (int b = 0; b <= m_; ++b) {
        if (a == 0 && b == 0) continue;
        const double g = spec_.damping(Mode{a, b}) / static_cast<double>(a * a + b * b);
        // c1 feeds K1 (needs b >= 1), c2 feeds K2 (needs a >= 1)
        c1_[idx(a, b)] = -(a == 0 ? 1.0 : 2.0) * b * g / std::numbers::pi;
        c2_[idx(a, b)] = (b == 0 ? 1.0 : 2.0) * a * g / std::numbers::pi;
      }
    }
  }

  const KernelSpec& spec() const { return spec_; }
  /// Number of modes per axis actually summed (may be below M when delta > 0).
  int effective_cutoff() const { return m_; }

  Vec2 operator()(const Vec2& x) const {
    const Vec2 d = min_image(x);
    const double ax = std::abs(d.x);
    const double ay = std::abs(d.y);
    if (ax == 0.0 && ay == 0.0) return {};
    thread_local std::vector<double> ca, sa, cb, sb;
    trig_table(ax, ca, sa);
    trig_table(ay, cb, sb);
    double k1 = 0.0;
    double k2 = 0.0;
    const int n = m_ + 1;
    for (int a = 0; a <= m_; ++a) {
      const double* r1 = &c1_[static_cast<std::size_t>(a * n)];
      const double* r2 = &c2_[static_cast<std::size_t>(a * n)];
      double s1 = 0.0;
      double s2 = 0.0;
      for (int b = 0; b <= m_; ++b) {
        s1 += r1[b] * sb[b];
        s2 += r2[b] * cb[b];
      }
      k1 += ca[a] * s1;
      k2 += sa[a] * s2;
    }
    return {std::copysign(1.0, d.y) * k1, std::copysign(1.0, d.x) * k2};
  }
  Vec2 operator()(const TorusPoint& x) const { return (*this)(x.vec()); }

 private:
  std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a * (m_ + 1) + b); }

  void trig_table(double t, std::vector<double>& c, std::vector<double>& s) const {
    c.resize(static_cast<std::size_t>(m_ + 1));
    s.resize(static_cast<std::size_t>(m_ + 1));
    const double c1 = std::cos(kTwoPi * t);
    const double s1 = std::sin(kTwoPi * t);
    c[0] = 1.0;
    s[0] = 0.0;
    for (int a = 1; a <= m_; ++a) {
      // Re-anchor periodically to keep recurrence drift at the 1e-15 level.
      if (a % 16 == 0) {
        c[a] = std::cos(kTwoPi * a * t);
        s[a] = std::sin(kTwoPi * a * t);
      } else {
        c[a] = c[a - 1] * c1 - s[a - 1] * s1;
        s[a] = s[a - 1] * c1 + c[a - 1] * s1;
      }
    }
  }

  KernelSpec spec_;
  int m_ = 0;
  std::vector<double> c1_;
  std::vector<double> c2_;
};

/// K(x) for a one-off evaluation.
inline Vec2 eval_kernel(const TorusPoint& x, const KernelSpec& spec) { return BiotSavartKernel(spec)(x); }

/// u(x) = N^{-1/2} sum_i xi_i K(x - X_i).
inline Vec2 velocity_at(const TorusPoint& x, const VortexConfiguration& config, const BiotSavartKernel& kernel) {
  if (config.empty()) throw std::invalid_argument("velocity_at: empty configuration");
  Vec2 u;
  for (std::size_t i = 0; i < config.size(); ++i) u += config.intensity(i) * kernel(x - config.position(i));
  return (1.0 / std::sqrt(static_cast<double>(config.size()))) * u;
}

/// omega^(k) = N^{-1/2} sum_i xi_i exp(-2 pi i k.X_i) for 0 < |k|_inf <= M.
inline FourierCoeffTable point_vorticity_coeffs(const VortexConfiguration& config, int M) {
  if (M < 1) throw std::invalid_argument("point_vorticity_coeffs: M must be >= 1");
  FourierCoeffTable t;
  t.M = M;
  const int n = 2 * M + 1;
  std::vector<cplx> acc(static_cast<std::size_t>(n * n));
  std::vector<cplx> e1(static_cast<std::size_t>(n)), e2(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& p = config.position(i);
    for (int a = -M; a <= M; ++a) {
      e1[static_cast<std::size_t>(a + M)] = std::polar(1.0, -kTwoPi * a * p.x1());
      e2[static_cast<std::size_t>(a + M)] = std::polar(1.0, -kTwoPi * a * p.x2());
    }
    const double xi = config.intensity(i);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc[static_cast<std::size_t>(a * n + b)] += xi * e1[a] * e2[b];
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(config.size()));
  for (int a = -M; a <= M; ++a) {
    for (int b = -M; b <= M; ++b) {
      if (a == 0 && b == 0) continue;
      t.coeffs[Mode{a, b}] = s * acc[static_cast<std::size_t>((a + M) * n + (b + M))];
    }
  }
  return t;
}

/// Rigorous upper bound on sum over lattice k with |k| > R of |k|^{-p}, p > 2.
/// Each lattice point owns its unit cell, whose points y satisfy
/// |k| >= |y| - sqrt(2)/2; integrating over |y| > R - sqrt(2)/2 gives the
/// closed form below. Returns +inf when p <= 2.
inline double lattice_tail_bound(double p, double R) {
  if (p <= 2.0) return std::numeric_limits<double>::infinity();
  const double c = std::numbers::sqrt2 / 2.0;
  const double a = R - 2.0 * c;
  if (a <= 0.0) return std::numeric_limits<double>::infinity();
  return kTwoPi * (std::pow(a, 2.0 - p) / (p - 2.0) + c * std::pow(a, 1.0 - p) / (p - 1.0));
}

struct SobolevNormResult {
  double norm = 0.0;
  /// Bound on sum_{|k|_inf > M} (1+|k|^2)^{-s}, the squared norm of a
  /// unit-coefficient tail.
  double tail_bound_sq = 0.0;
};

inline SobolevNormResult sobolev_norm(const FourierCoeffTable& coeffs, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("sobolev_norm: s must be positive");
  double acc = 0.0;
  for (const auto& [k, c] : coeffs.coeffs) {
    if (k.is_zero() || k.sup_norm() > coeffs.M) continue;
    acc += std::pow(1.0 + static_cast<double>(k.norm_sq()), -s) * std::norm(c);
  }
  // (1+|k|^2)^{-s} <= |k|^{-2s}; |k|_inf > M implies |k| > M.
  return {std::sqrt(acc), lattice_tail_bound(2.0 * s, static_cast<double>(coeffs.M))};
}

/// sum_{0<|k|_inf<=M} (1+|k|^2)^{-s}: the expected squared norm of a white-noise sample.
inline double sobolev_weight_sum(int M, double s) {
  double acc = 0.0;
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b)
      if (a != 0 || b != 0) acc += std::pow(1.0 + a * a + b * b, -s);
  return acc;
}

}  // namespace vlab
