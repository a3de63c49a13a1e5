// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Point-vortex approximations of spatial white noise: samplers for the
// product law (N(0,1) x Leb)^N and for density-weighted laws, the closed-form
// fourth moment of quadratic statistics, and Gaussianity diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vlab/cylinder_functional.hpp"
#include "vlab/parallel.hpp"
#include "vlab/point_vorticity.hpp"
#include "vlab/rng.hpp"
#include "vlab/stats.hpp"
#include "vlab/trig_poly.hpp"

namespace vlab {

/// Draw one configuration from (N(0,1) x Leb)^N; `index` selects the stream.
inline VortexConfiguration sample_white_noise_config(std::size_t N, std::uint64_t seed, std::uint32_t index,
                                                     std::uint32_t attempt = 0) {
  if (N < 1) throw std::invalid_argument("sample_white_noise: N must be >= 1");
  CounterStream rng(seed, RngDomain::kWhiteNoise, index, attempt);
  std::vector<double> xi(N);
  std::vector<TorusPoint> x(N);
  for (std::size_t i = 0; i < N; ++i) {
    double v = 0.0;
    while (v == 0.0) v = rng.normal();
    xi[i] = v;
    const double a = rng.uniform();
    x[i] = TorusPoint(a, rng.uniform());
  }
  return {std::move(xi), std::move(x)};
}

inline PointVorticity sample_white_noise_vortices(std::size_t N, std::uint64_t seed, std::uint32_t index) {
  return PointVorticity(sample_white_noise_config(N, seed, index));
}

/// Symmetric f(x, y) on T^2 x T^2. A separable form sum_r c_r phi_r(x) psi_r(y)
/// (symmetrized) allows O(N) quadratic statistics and exact integrals; a
/// general callable falls back to O(N^2) sums and quadrature only.
class PairFunction {
 public:
  struct Term {
    double c;
    TrigPoly phi;
    TrigPoly psi;
  };

  static PairFunction separable(std::string name, std::vector<Term> terms) {
    PairFunction f;
    f.name_ = std::move(name);
    // Symmetrize: (phi(x)psi(y) + psi(x)phi(y)) / 2
    for (auto& t : terms) {
      f.terms_.push_back({0.5 * t.c, t.phi, t.psi});
      f.terms_.push_back({0.5 * t.c, t.psi, t.phi});
    }
    return f;
  }

  static PairFunction general(std::string name, std::function<double(const Vec2&, const Vec2&)> fn) {
    PairFunction f;
    f.name_ = std::move(name);
    f.fn_ = std::move(fn);
    return f;
  }

  /// f = 1
  static PairFunction one() { return separable("one", {{1.0, TrigPoly::constant(1.0), TrigPoly::constant(1.0)}}); }

  /// f = cos(2 pi (x1 - y1)) = cos cos + sin sin
  static PairFunction cos_difference() {
    return separable("cos_diff_x1", {{1.0, TrigPoly::cosine({1, 0}), TrigPoly::cosine({1, 0})},
                                     {1.0, TrigPoly::sine({1, 0}), TrigPoly::sine({1, 0})}});
  }

  /// f = cos(2 pi x1) cos(2 pi y1)
  static PairFunction cos_product() {
    return separable("cos_prod_x1", {{1.0, TrigPoly::cosine({1, 0}), TrigPoly::cosine({1, 0})}});
  }

  const std::string& name() const { return name_; }
  bool is_separable() const { return !fn_; }
  const std::vector<Term>& terms() const { return terms_; }

  double operator()(const Vec2& x, const Vec2& y) const {
    if (fn_) return fn_(x, y);
    double s = 0.0;
    for (const auto& t : terms_) s += t.c * t.phi(x) * t.psi(y);
    return s;
  }

  /// <omega (x) omega, f>
  double quadratic(const PointVorticity& w) const {
    if (fn_) return w.quadratic(fn_);
    double s = 0.0;
    for (const auto& t : terms_) s += t.c * w.pairing(t.phi) * w.pairing(t.psi);
    return s;
  }

  /// Exact integrals for separable f: {int f(x,x), int f(x,x)^2, int int f^2}.
  std::optional<std::array<double, 3>> exact_integrals() const {
    if (fn_) return std::nullopt;
    TrigPoly diag;
    for (const auto& t : terms_) diag += t.c * (t.phi * t.psi);
    double dd = 0.0;
    for (const auto& r : terms_)
      for (const auto& s : terms_) dd += r.c * s.c * inner(r.phi, s.phi) * inner(r.psi, s.psi);
    return std::array<double, 3>{diag.mean(), diag.l2_norm_sq(), dd};
  }

 private:
  static double inner(const TrigPoly& a, const TrigPoly& b) {
    double s = 0.0;
    for (const auto& [k, c] : a.coeffs()) s += (c * std::conj(b.coeff(k))).real();
    return s;
  }

  std::string name_;
  std::vector<Term> terms_;
  std::function<double(const Vec2&, const Vec2&)> fn_;
};

/// <omega (x) omega, f> = N^{-1} sum_{i,j} xi_i xi_j f(X_i, X_j)
inline double quadratic_statistic(const PointVorticity& w, const PairFunction& f) { return f.quadratic(w); }

struct QuadratureOptions {
  int grid = 256;      // per axis on T^2 for the diagonal integrals
  int pair_grid = 32;  // per axis on T^2 x T^2 (n^4 nodes) for int int f^2
};

struct MomentOracleResult {
  double value = 0.0;
  double quadrature_error = 0.0;  // Richardson estimate from halving both grids
  double diag_mean = 0.0;         // int f(x,x) dx
  double diag_sq = 0.0;           // int f(x,x)^2 dx
  double double_sq = 0.0;         // int int f(x,y)^2 dx dy
  QuadratureOptions quadrature{};
};

namespace detail {

inline std::array<double, 3> trapezoid_integrals(const PairFunction& f, int n, int n4) {
  double d1 = 0.0, d2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x{static_cast<double>(i) / n, static_cast<double>(j) / n};
      const double v = f(x, x);
      d1 += v;
      d2 += v * v;
    }
  const double h2 = 1.0 / (static_cast<double>(n) * n);
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n4) * n4);
  for (int i = 0; i < n4; ++i)
    for (int j = 0; j < n4; ++j) pts.push_back({static_cast<double>(i) / n4, static_cast<double>(j) / n4});
  double dd = 0.0;
  for (const auto& x : pts)
    for (const auto& y : pts) {
      const double v = f(x, y);
      dd += v * v;
    }
  const double h4 = 1.0 / (static_cast<double>(pts.size()) * static_cast<double>(pts.size()));
  return {d1 * h2, d2 * h2, dd * h4};
}

inline double quadratic_moment_formula(double N, double diag_mean, double diag_sq, double double_sq) {
  return 3.0 / N * diag_sq + (N - 1.0) / N * diag_mean * diag_mean + 2.0 * (N - 1.0) / N * double_sq;
}

}  // namespace detail

/// E <omega (x) omega, f>^2 under (N(0,1) x Leb)^N:
///   (3/N) int f(x,x)^2 + ((N-1)/N) [int f(x,x)]^2 + (2(N-1)/N) int int f^2,
/// by periodic trapezoid quadrature.
inline MomentOracleResult moment_oracle(const PairFunction& f, std::size_t N, QuadratureOptions q = {}) {
  if (N < 1) throw std::invalid_argument("moment_oracle: N must be >= 1");
  const auto fine = detail::trapezoid_integrals(f, q.grid, q.pair_grid);
  const auto coarse = detail::trapezoid_integrals(f, std::max(1, q.grid / 2), std::max(1, q.pair_grid / 2));
  const double n = static_cast<double>(N);
  MomentOracleResult r;
  r.diag_mean = fine[0];
  r.diag_sq = fine[1];
  r.double_sq = fine[2];
  r.value = detail::quadratic_moment_formula(n, fine[0], fine[1], fine[2]);
  r.quadrature_error = std::abs(r.value - detail::quadratic_moment_formula(n, coarse[0], coarse[1], coarse[2]));
  r.quadrature = q;
  return r;
}

/// The same closed form from exact Fourier integrals (separable f only).
inline std::optional<double> moment_exact(const PairFunction& f, std::size_t N) {
  const auto e = f.exact_integrals();
  if (!e) return std::nullopt;
  return detail::quadratic_moment_formula(static_cast<double>(N), (*e)[0], (*e)[1], (*e)[2]);
}

inline constexpr std::size_t kChunk = 512;

/// Monte Carlo mean of <omega (x) omega, f>^2 over `samples` white-noise draws.
inline stats::RunningStats moment_monte_carlo(const PairFunction& f, std::size_t N, std::size_t samples,
                                              std::uint64_t seed, int threads = 0) {
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  const auto parts = parallel_map(
      chunks,
      [&](std::size_t c) {
        stats::RunningStats s;
        for (std::size_t i = c * kChunk; i < std::min(samples, (c + 1) * kChunk); ++i) {
          const double q = f.quadratic(sample_white_noise_vortices(N, seed, static_cast<std::uint32_t>(i)));
          s.add(q * q);
        }
        return s;
      },
      threads);
  stats::RunningStats all;
  for (const auto& p : parts) all.merge(p);
  return all;
}

/// Raised when a density exceeds its declared bound.
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nonnegative bounded cylinder functional with user-declared sup.
class DensityFunctional {
 public:
  DensityFunctional(CylinderFunctional f, double sup) : f_(std::move(f)), sup_(sup) {
    if (!(sup_ > 0.0)) throw std::invalid_argument("DensityFunctional: sup must be positive");
  }

  static DensityFunctional uniform() { return {CylinderFunctional::constant(1.0), 1.0}; }

  /// c (1 + tanh <omega, phi>), sup 2c
  static DensityFunctional tanh_tilt(const TrigPoly& phi, double c) {
    return {CylinderFunctional(OuterKind::kTanh, Polynomial::linear({1.0}), {phi}, c, c), 2.0 * c};
  }

  /// c exp(-a <omega, phi>^2), sup c
  static DensityFunctional gaussian_bump(const TrigPoly& phi, double a, double c) {
    return {CylinderFunctional(OuterKind::kExp, Polynomial(1, {{-a, {2}}}), {phi}, c, 0.0), c};
  }

  const CylinderFunctional& functional() const { return f_; }
  double sup() const { return sup_; }

  double operator()(const PointVorticity& w) const {
    const double v = f_(w);
    if (!(v >= 0.0) || v > sup_ * (1.0 + 1e-12))
      throw ContractViolation("density value " + std::to_string(v) + " outside [0, " + std::to_string(sup_) + "]");
    return v;
  }

  nlohmann::json to_json() const { return {{"functional", f_.to_json()}, {"sup", sup_}}; }
  static DensityFunctional from_json(const nlohmann::json& j) {
    return {CylinderFunctional::from_json(j.at("functional")), j.at("sup").get<double>()};
  }

 private:
  CylinderFunctional f_;
  double sup_;
};

struct DensitySample {
  VortexConfiguration config;
  std::uint32_t attempts = 0;
  double ratio_sum = 0.0;     // sum over proposals of rho / sup
  double ratio_sq_sum = 0.0;  // sum of squares of the same
};

/// One draw from C_N rho mu_N^0 by rejection against (N(0,1) x Leb)^N.
inline DensitySample sample_density(std::size_t N, const DensityFunctional& rho, std::uint64_t seed,
                                    std::uint32_t index, std::uint32_t max_attempts = 1u << 20) {
  CounterStream accept(seed, RngDomain::kRejection, index);
  DensitySample out;
  for (std::uint32_t a = 0; a < max_attempts; ++a) {
    auto cfg = sample_white_noise_config(N, seed, index, a + 1);
    const double r = rho(PointVorticity(cfg)) / rho.sup();
    out.ratio_sum += r;
    out.ratio_sq_sum += r * r;
    ++out.attempts;
    if (accept.uniform() < r) {
      out.config = std::move(cfg);
      return out;
    }
  }
  throw std::runtime_error("sample_density: no acceptance within the attempt budget");
}

struct RejectionSummary {
  std::size_t samples = 0;
  std::size_t proposals = 0;
  double acceptance_rate = 0.0;
  /// 1/(sup * acceptance): Bernoulli estimate of C_N
  double c_n_bernoulli = 0.0;
  /// 1/(sup * mean(rho/sup)): lower-variance estimate from the same proposals
  double c_n = 0.0;
  double c_n_stderr = 0.0;
  std::vector<VortexConfiguration> accepted;
};

inline RejectionSummary rejection_ensemble(std::size_t N, const DensityFunctional& rho, std::size_t samples,
                                           std::uint64_t seed, int threads = 0, bool keep = true) {
  auto draws = parallel_map(
      samples, [&](std::size_t i) { return sample_density(N, rho, seed, static_cast<std::uint32_t>(i)); }, threads);
  RejectionSummary s;
  s.samples = samples;
  double ratio = 0.0;
  double ratio_sq = 0.0;
  for (auto& d : draws) {
    s.proposals += d.attempts;
    ratio += d.ratio_sum;
    ratio_sq += d.ratio_sq_sum;
    if (keep) s.accepted.push_back(std::move(d.config));
  }
  s.acceptance_rate = static_cast<double>(samples) / static_cast<double>(s.proposals);
  s.c_n_bernoulli = 1.0 / (rho.sup() * s.acceptance_rate);
  s.c_n = static_cast<double>(s.proposals) / (rho.sup() * ratio);
  // Delta method on the mean ratio. The stopping rule makes proposals a
  // random count, which this i.i.d. formula ignores; it is reported, not tested.
  const double np = static_cast<double>(s.proposals);
  const double m = ratio / np;
  const double var = std::max(0.0, ratio_sq / np - m * m);
  s.c_n_stderr = s.c_n * std::sqrt(var / np) / m;
  return s;
}

/// Normalizing constant 1 / int rho dmu_N^0 estimated from plain proposals,
/// with its standard error (delta method).
inline std::pair<double, double> normalizing_constant(std::size_t N, const DensityFunctional& rho,
                                                      std::size_t proposals, std::uint64_t seed, int threads = 0) {
  const std::size_t chunks = (proposals + kChunk - 1) / kChunk;
  const auto parts = parallel_map(
      chunks,
      [&](std::size_t c) {
        stats::RunningStats s;
        for (std::size_t i = c * kChunk; i < std::min(proposals, (c + 1) * kChunk); ++i)
          s.add(rho(sample_white_noise_vortices(N, seed, static_cast<std::uint32_t>(i))));
        return s;
      },
      threads);
  stats::RunningStats all;
  for (const auto& p : parts) all.merge(p);
  const double c = 1.0 / all.mean();
  return {c, c * all.stderr_mean() / all.mean()};
}

/// Self-normalized importance estimate of E_{C_N rho mu_N^0}[h] from plain
/// proposals, with delta-method standard error.
template <class H>
std::pair<double, double> importance_estimate(std::size_t N, const DensityFunctional& rho, H&& h, std::size_t proposals,
                                              std::uint64_t seed) {
  std::vector<double> w(proposals), v(proposals);
  double sw = 0.0;
  for (std::size_t i = 0; i < proposals; ++i) {
    const auto om = sample_white_noise_vortices(N, seed, static_cast<std::uint32_t>(i));
    w[i] = rho(om);
    v[i] = h(om);
    sw += w[i];
  }
  double num = 0.0;
  for (std::size_t i = 0; i < proposals; ++i) num += w[i] * v[i];
  const double est = num / sw;
  double var = 0.0;
  for (std::size_t i = 0; i < proposals; ++i) var += w[i] * w[i] * (v[i] - est) * (v[i] - est);
  return {est, std::sqrt(var) / sw};
}

// ---------------------------------------------------------------------------
// Gaussianity diagnostics

struct GaussianityOptions {
  std::size_t N = 10000;
  std::size_t samples = 10000;
  double max_mode_norm = 3.0;
  std::vector<std::pair<std::string, TrigPoly>> tests;  // phi with known ||phi||^2
  std::uint64_t seed = 1;
  int threads = 0;
  double family_alpha = stats::three_sigma_alpha();
};

struct ModeStats {
  Mode k;
  double mean_re = 0.0, mean_re_se = 0.0;
  double mean_im = 0.0, mean_im_se = 0.0;
  double abs_sq = 0.0, abs_sq_se = 0.0;  // E|eta_k|^2, target 1
  double var_re = 0.0, var_im = 0.0;     // target 1/2 each
  double jb_p_re = 1.0, jb_p_im = 1.0;
};

struct CovarianceEntry {
  std::size_t a = 0, b = 0;  // indices into the real component list (2 per mode: re, im)
  double estimate = 0.0, stderr_ = 0.0, target = 0.0;
  double z() const { return stderr_ > 0.0 ? (estimate - target) / stderr_ : 0.0; }
};

struct TestVariance {
  std::string name;
  double estimate = 0.0, stderr_ = 0.0, target = 0.0;
};

struct GaussianityReport {
  std::size_t N = 0, samples = 0;
  std::vector<ModeStats> modes;
  std::vector<CovarianceEntry> covariances;
  std::vector<TestVariance> variances;
  double band = 3.0;                // family-wise band in standard errors
  double max_abs_z = 0.0;
  std::size_t exceed_3se = 0;       // entries outside a per-entry 3 s.e. band
  double min_jb_p = 1.0;
  double jb_threshold = 0.0;        // per-test level keeping family-wise alpha

  bool covariances_pass() const { return max_abs_z <= band; }
  bool normality_pass() const { return min_jb_p >= jb_threshold; }
};

/// Half-lattice modes with 0 < |k| <= r, sorted by |k|^2 then lexicographically.
inline std::vector<Mode> modes_within(double r) {
  std::vector<Mode> out;
  const int R = static_cast<int>(std::floor(r));
  for (int a = 0; a <= R; ++a)
    for (int b = -R; b <= R; ++b) {
      const Mode k{a, b};
      if (k.in_half_lattice() && static_cast<double>(k.norm_sq()) <= r * r + 1e-12) out.push_back(k);
    }
  std::sort(out.begin(), out.end(), [](const Mode& p, const Mode& q) {
    return p.norm_sq() != q.norm_sq() ? p.norm_sq() < q.norm_sq() : p < q;
  });
  return out;
}

namespace detail {

/// eta_k for every k in `modes` at once using per-atom power tables.
inline std::vector<cplx> etas(const VortexConfiguration& c, const std::vector<Mode>& modes, int R) {
  std::vector<cplx> out(modes.size());
  std::vector<cplx> p1(static_cast<std::size_t>(R + 1)), p2(static_cast<std::size_t>(2 * R + 1));
  const double s = 1.0 / std::sqrt(static_cast<double>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const cplx e1 = std::polar(1.0, kTwoPi * c.position(i).x1());
    const cplx e2 = std::polar(1.0, kTwoPi * c.position(i).x2());
    p1[0] = 1.0;
    for (int a = 1; a <= R; ++a) p1[a] = p1[a - 1] * e1;
    p2[R] = 1.0;
    for (int b = 1; b <= R; ++b) {
      p2[R + b] = p2[R + b - 1] * e2;
      p2[R - b] = std::conj(p2[R + b]);
    }
    const double w = s * c.intensity(i);
    for (std::size_t m = 0; m < modes.size(); ++m) out[m] += w * p1[modes[m].k1] * p2[R + modes[m].k2];
  }
  return out;
}

}  // namespace detail

inline GaussianityReport gaussianity_report(const GaussianityOptions& opt) {
  const auto modes = modes_within(opt.max_mode_norm);
  const int R = static_cast<int>(std::floor(opt.max_mode_norm));
  const std::size_t m = modes.size();
  const std::size_t nt = opt.tests.size();
  // Per sample: 2m real components followed by the nt test pairings.
  const std::size_t width = 2 * m + nt;
  const auto rows = parallel_map(
      opt.samples,
      [&](std::size_t i) {
        const auto cfg = sample_white_noise_config(opt.N, opt.seed, static_cast<std::uint32_t>(i));
        const auto e = detail::etas(cfg, modes, R);
        std::vector<double> row(width);
        for (std::size_t k = 0; k < m; ++k) {
          row[2 * k] = e[k].real();
          row[2 * k + 1] = e[k].imag();
        }
        const PointVorticity w(cfg);
        for (std::size_t t = 0; t < nt; ++t) row[2 * m + t] = w.pairing(opt.tests[t].second);
        return row;
      },
      opt.threads);

  GaussianityReport r;
  r.N = opt.N;
  r.samples = opt.samples;
  const double n = static_cast<double>(opt.samples);
  std::vector<double> mean(width, 0.0);
  for (const auto& row : rows)
    for (std::size_t a = 0; a < width; ++a) mean[a] += row[a] / n;

  std::vector<std::vector<double>> col(2 * m, std::vector<double>(opt.samples));
  for (std::size_t s = 0; s < opt.samples; ++s)
    for (std::size_t a = 0; a < 2 * m; ++a) col[a][s] = rows[s][a];

  for (std::size_t k = 0; k < m; ++k) {
    ModeStats ms;
    ms.k = modes[k];
    const auto re = stats::summarize(col[2 * k]);
    const auto im = stats::summarize(col[2 * k + 1]);
    stats::RunningStats abs2;
    for (std::size_t s = 0; s < opt.samples; ++s) abs2.add(col[2 * k][s] * col[2 * k][s] + col[2 * k + 1][s] * col[2 * k + 1][s]);
    ms.mean_re = re.mean();
    ms.mean_re_se = re.stderr_mean();
    ms.mean_im = im.mean();
    ms.mean_im_se = im.stderr_mean();
    ms.abs_sq = abs2.mean();
    ms.abs_sq_se = abs2.stderr_mean();
    ms.var_re = re.variance();
    ms.var_im = im.variance();
    ms.jb_p_re = stats::jarque_bera(col[2 * k]).p_value;
    ms.jb_p_im = stats::jarque_bera(col[2 * k + 1]).p_value;
    r.min_jb_p = std::min({r.min_jb_p, ms.jb_p_re, ms.jb_p_im});
    r.modes.push_back(ms);
  }
  r.jb_threshold = 2 * m > 0 ? -std::expm1(std::log1p(-opt.family_alpha) / static_cast<double>(2 * m)) : 0.0;

  // Covariances of the real components; target cov = delta_ab / 2.
  for (std::size_t a = 0; a < 2 * m; ++a)
    for (std::size_t b = a; b < 2 * m; ++b) {
      stats::RunningStats p;
      for (std::size_t s = 0; s < opt.samples; ++s) p.add((col[a][s] - mean[a]) * (col[b][s] - mean[b]));
      CovarianceEntry c;
      c.a = a;
      c.b = b;
      c.estimate = p.mean() * n / (n - 1.0);
      c.stderr_ = p.stderr_mean();
      c.target = a == b ? 0.5 : 0.0;
      r.max_abs_z = std::max(r.max_abs_z, std::abs(c.z()));
      if (std::abs(c.z()) > 3.0) ++r.exceed_3se;
      r.covariances.push_back(c);
    }
  r.band = stats::sidak_band(opt.family_alpha, r.covariances.size());

  for (std::size_t t = 0; t < nt; ++t) {
    stats::RunningStats sq;
    for (const auto& row : rows) sq.add(row[2 * m + t] * row[2 * m + t]);
    // E<omega, phi> = 0 exactly, so the variance is E<omega, phi>^2 = ||phi||^2.
    r.variances.push_back({opt.tests[t].first, sq.mean(), sq.stderr_mean(), opt.tests[t].second.l2_norm_sq()});
  }
  return r;
}

/// Jarque-Bera p-value of <omega, phi> over `samples` draws at size N.
inline double normality_p_value(std::size_t N, const TrigPoly& phi, std::size_t samples, std::uint64_t seed) {
  std::vector<double> v(samples);
  for (std::size_t i = 0; i < samples; ++i)
    v[i] = sample_white_noise_vortices(N, seed, static_cast<std::uint32_t>(i)).pairing(phi);
  return stats::jarque_bera(v).p_value;
}

}  // namespace vlab
