// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Transport-noise fields. The complex family sigma_k = e_k k_perp / |k|^gamma
// is simulated through the real pairs
//   a_k = sqrt2 cos(2 pi k.x) k_perp/|k|^gamma,  b_k = sqrt2 sin(2 pi k.x) k_perp/|k|^gamma
// over a half-lattice, which reproduce the complex covariance summed over +-k.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vlab/torus.hpp"
#include "vlab/torus_spectral.hpp"
#include "vlab/trig_poly.hpp"

namespace vlab {

enum class Branch { kCos, kSin, kCustom };

/// One real divergence-free field with closed-form value and Jacobian.
struct NoiseField {
  TrigField field;               // exact Fourier representation
  Branch branch = Branch::kCustom;
  Mode mode{};                   // family fields only
  Vec2 amp{};                    // family fields: sqrt2 k_perp / |k|^gamma

  Vec2 value(const Vec2& x) const {
    switch (branch) {
      case Branch::kCos: return std::cos(phase(mode, x)) * amp;
      case Branch::kSin: return std::sin(phase(mode, x)) * amp;
      case Branch::kCustom: break;
    }
    return field(x);
  }

  /// J(r, c) = d sigma_r / d x_c
  Mat2 jacobian(const Vec2& x) const {
    if (branch == Branch::kCustom) return field.jacobian(x);
    const double th = phase(mode, x);
    const double dt = branch == Branch::kCos ? -std::sin(th) : std::cos(th);
    const Vec2 g{kTwoPi * mode.k1 * dt, kTwoPi * mode.k2 * dt};
    return outer(amp, g);
  }

  /// (sigma . grad) sigma at x.
  Vec2 self_advection(const Vec2& x) const { return jacobian(x) * value(x); }
};

class NoiseBasis {
 public:
  static constexpr const char* kFamilyNormalization = "sqrt2_cos_sin_half_lattice";
  static constexpr const char* kCustomNormalization = "custom";

  NoiseBasis() = default;

  /// First m_noise real fields of the family in canonical order.
  static NoiseBasis family(double gamma, int m_noise) {
    if (!(gamma >= 2.0)) throw std::invalid_argument("build_basis: gamma must be >= 2");
    if (m_noise < 1) throw std::invalid_argument("build_basis: M_noise must be >= 1");
    NoiseBasis b;
    b.gamma_ = gamma;
    b.normalization_ = kFamilyNormalization;
    const std::size_t n_modes = static_cast<std::size_t>((m_noise + 1) / 2);
    for (const Mode& k : half_lattice_modes(n_modes)) {
      for (Branch br : {Branch::kCos, Branch::kSin}) {
        if (static_cast<int>(b.fields_.size()) == m_noise) break;
        b.fields_.push_back(family_field(k, gamma, br));
      }
      b.modes_.push_back(k);
    }
    return b;
  }

  /// Both branches of each listed half-lattice mode, in the given order.
  static NoiseBasis family_modes(double gamma, const std::vector<Mode>& modes) {
    if (!(gamma >= 2.0)) throw std::invalid_argument("build_basis: gamma must be >= 2");
    NoiseBasis b;
    b.gamma_ = gamma;
    b.normalization_ = kFamilyNormalization;
    for (const Mode& k : modes) {
      if (!k.in_half_lattice()) throw std::invalid_argument("family_modes: mode not in the half-lattice");
      b.modes_.push_back(k);
      b.fields_.push_back(family_field(k, gamma, Branch::kCos));
      b.fields_.push_back(family_field(k, gamma, Branch::kSin));
    }
    return b;
  }

  /// User-supplied fields; each must be divergence-free.
  static NoiseBasis custom(const std::vector<TrigField>& fields) {
    NoiseBasis b;
    b.normalization_ = kCustomNormalization;
    for (const auto& f : fields) {
      if (!f.is_divergence_free(1e-10)) throw std::invalid_argument("NoiseBasis::custom: field is not divergence-free");
      b.fields_.push_back(NoiseField{f, Branch::kCustom, {}, {}});
    }
    return b;
  }

  /// Half-lattice modes sorted by |k|^2, then lexicographically.
  static std::vector<Mode> half_lattice_modes(std::size_t count) {
    std::vector<Mode> out;
    if (count == 0) return out;
    int r = 1;
    for (;;) {
      out.clear();
      for (int a = 0; a <= r; ++a)
        for (int b = -r; b <= r; ++b) {
          const Mode k{a, b};
          if (k.in_half_lattice() && k.norm_sq() <= static_cast<long>(r) * r) out.push_back(k);
        }
      if (out.size() >= count) break;
      r *= 2;
    }
    std::sort(out.begin(), out.end(), [](const Mode& p, const Mode& q) {
      return p.norm_sq() != q.norm_sq() ? p.norm_sq() < q.norm_sq() : p < q;
    });
    out.resize(count);
    return out;
  }

  std::size_t size() const { return fields_.size(); }
  bool empty() const { return fields_.empty(); }
  bool is_family() const { return normalization_ == kFamilyNormalization; }
  /// gamma = 2 disables every (H2)-dependent guarantee.
  bool experimental() const { return is_family() && gamma_ <= 2.0; }
  double gamma() const { return gamma_; }
  const std::vector<Mode>& modes() const { return modes_; }
  const std::string& normalization() const { return normalization_; }
  const NoiseField& field(std::size_t j) const { return fields_[j]; }
  const std::vector<NoiseField>& fields() const { return fields_; }

  Vec2 value(std::size_t j, const Vec2& x) const { return fields_[j].value(x); }

  /// sum_j sigma_j(x) w_j
  Vec2 combine(const Vec2& x, const std::vector<double>& w) const {
    Vec2 s;
    for (std::size_t j = 0; j < fields_.size(); ++j) s += w[j] * fields_[j].value(x);
    return s;
  }

  /// Largest wavenumber sup-norm among the fields.
  int bandwidth() const {
    int b = 0;
    for (const auto& f : fields_) b = std::max(b, f.field.bandwidth());
    return b;
  }

  nlohmann::json to_json() const {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& k : modes_) modes.push_back({k.k1, k.k2});
    nlohmann::json j{{"gamma", gamma_}, {"modes", modes}, {"normalization", normalization_}, {"M_noise", fields_.size()}};
    if (!is_family()) {
      nlohmann::json fs = nlohmann::json::array();
      for (const auto& f : fields_) fs.push_back(f.field.to_json());
      j["fields"] = fs;
    }
    return j;
  }

  static NoiseBasis from_json(const nlohmann::json& j) {
    if (j.value("normalization", std::string(kFamilyNormalization)) == kCustomNormalization) {
      std::vector<TrigField> fs;
      for (const auto& f : j.at("fields")) fs.push_back(TrigField::from_json(f));
      return custom(fs);
    }
    const double gamma = j.at("gamma").get<double>();
    if (j.contains("M_noise") && !j.contains("modes")) return family(gamma, j.at("M_noise").get<int>());
    std::vector<Mode> modes;
    for (const auto& m : j.at("modes")) modes.push_back({m.at(0).get<int>(), m.at(1).get<int>()});
    NoiseBasis b = family_modes(gamma, modes);
    if (j.contains("M_noise")) b.fields_.resize(std::min(b.fields_.size(), j.at("M_noise").get<std::size_t>()));
    return b;
  }

 private:
  static NoiseField family_field(const Mode& k, double gamma, Branch br) {
    const double s = std::numbers::sqrt2 / std::pow(k.norm(), gamma);
    const Vec2 amp = s * k.perp();
    const TrigPoly p = br == Branch::kCos ? TrigPoly::cosine(k) : TrigPoly::sine(k);
    return NoiseField{TrigField{amp.x * p, amp.y * p}, br, k, amp};
  }

  double gamma_ = 0.0;
  std::string normalization_ = kCustomNormalization;
  std::vector<Mode> modes_;
  std::vector<NoiseField> fields_;
};

inline NoiseBasis build_basis(double gamma, int m_noise) { return NoiseBasis::family(gamma, m_noise); }

/// Q(x, y) = sum_j sigma_j(x) (x) sigma_j(y)
inline Mat2 covariance(const NoiseBasis& basis, const Vec2& x, const Vec2& y) {
  Mat2 q;
  for (const auto& f : basis.fields()) q += outer(f.value(x), f.value(y));
  return q;
}
inline Mat2 covariance(const NoiseBasis& basis, const TorusPoint& x, const TorusPoint& y) {
  return covariance(basis, x.vec(), y.vec());
}

/// 1/2 sum_j (sigma_j . grad) sigma_j (x)
inline Vec2 ito_correction(const NoiseBasis& basis, const Vec2& x) {
  Vec2 s;
  for (const auto& f : basis.fields()) s += f.self_advection(x);
  return 0.5 * s;
}
inline Vec2 ito_correction(const NoiseBasis& basis, const TorusPoint& x) { return ito_correction(basis, x.vec()); }

struct CovarianceReport {
  Mat2 q_diag;                      // Q(x,x) at the origin
  double q_homogeneity_dev = 0.0;   // max |Q(x,x) - Q(0,0)| over a probe grid
  double sum_sup_sq = 0.0;          // complex-family convention: sum over modes of 2|k|^{2-2 gamma}
  double sum_sup_sq_real = 0.0;     // sum over the real fields of ||sigma_j||_inf^2
  double sum_sigma_grad_sigma = 0.0;
  double tail_bound = 0.0;          // bound on the excluded part of sum_sup_sq
  bool diverges = false;            // full family sum infinite (gamma <= 2)
  bool experimental = false;

  nlohmann::json to_json() const {
    return {{"Q_diag", {{q_diag(0, 0), q_diag(0, 1)}, {q_diag(1, 0), q_diag(1, 1)}}},
            {"Q_homogeneity_dev", q_homogeneity_dev},
            {"sum_sup_sq", sum_sup_sq},
            {"sum_sup_sq_real", sum_sup_sq_real},
            {"sum_sigma_grad_sigma", sum_sigma_grad_sigma},
            {"tail_bound", diverges ? nlohmann::json("inf") : nlohmann::json(tail_bound)},
            {"diverges", diverges},
            {"experimental", experimental}};
  }
};

namespace detail {

/// Max of |v(x)| over an n x n probe grid.
template <class F>
double grid_sup(F&& v, int n = 64) {
  double m = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m = std::max(m, norm(v(Vec2{(i + 0.5) / n, (j + 0.5) / n})));
  return m;
}

}  // namespace detail

inline CovarianceReport h2_sums(const NoiseBasis& basis) {
  CovarianceReport r;
  r.q_diag = covariance(basis, Vec2{}, Vec2{});
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const Vec2 x{i / 8.0 + 0.031, j / 8.0 + 0.017};
      const Mat2 q = covariance(basis, x, x);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) r.q_homogeneity_dev = std::max(r.q_homogeneity_dev, std::abs(q(a, b) - r.q_diag(a, b)));
    }

  if (!basis.is_family()) {
    for (const auto& f : basis.fields()) {
      const double s = detail::grid_sup([&](const Vec2& x) { return f.value(x); });
      r.sum_sup_sq_real += s * s;
      r.sum_sigma_grad_sigma += detail::grid_sup([&](const Vec2& x) { return f.self_advection(x); });
    }
    r.sum_sup_sq = 0.5 * r.sum_sup_sq_real;
    return r;
  }

  const double gamma = basis.gamma();
  r.experimental = basis.experimental();
  // ||a_k||_inf^2 = ||b_k||_inf^2 = 2 |k|^{2-2 gamma}; sigma_k . grad sigma_k = 0 since k_perp . k = 0.
  std::map<Mode, int> included;
  for (const auto& f : basis.fields()) {
    r.sum_sup_sq_real += 2.0 * std::pow(static_cast<double>(f.mode.norm_sq()), 1.0 - gamma);
    ++included[f.mode];
  }
  r.sum_sup_sq = 0.5 * r.sum_sup_sq_real;
  r.sum_sigma_grad_sigma = 0.0;

  if (gamma <= 2.0) {
    r.diverges = true;
    r.tail_bound = std::numeric_limits<double>::infinity();
    return r;
  }
  // Excluded complex-family weight: exact up to radius R, integral bound beyond.
  long r2 = 0;
  for (const auto& k : basis.modes()) r2 = std::max(r2, k.norm_sq());
  const int R = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(r2)))) + 16;
  double exact = 0.0;
  for (int a = 0; a <= R; ++a)
    for (int b = -R; b <= R; ++b) {
      const Mode k{a, b};
      if (!k.in_half_lattice() || k.norm_sq() > static_cast<long>(R) * R) continue;
      const auto it = included.find(k);
      const int missing = 2 - (it == included.end() ? 0 : it->second);
      exact += missing * std::pow(static_cast<double>(k.norm_sq()), 1.0 - gamma);
    }
  r.tail_bound = exact + lattice_tail_bound(2.0 * gamma - 2.0, static_cast<double>(R));
  return r;
}

/// Truncated complex-family sum over 0 < |k| <= R of |k|^{2 - 2 gamma}.
inline double truncated_family_sum(double gamma, double R) {
  const int r = static_cast<int>(std::floor(R));
  double s = 0.0;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b) {
      const long n2 = static_cast<long>(a) * a + static_cast<long>(b) * b;
      if (n2 == 0 || static_cast<double>(n2) > R * R) continue;
      s += std::pow(static_cast<double>(n2), 1.0 - gamma);
    }
  return s;
}

}  // namespace vlab
