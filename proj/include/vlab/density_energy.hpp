// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Pseudo-spectral solver for the transport-diffusion equation
//   du/dt = -b.grad u + 1/2 sum_k sigma_k.grad(sigma_k.grad u)
// on the torus, the gradient energy sum_k int ||sigma_k.grad u||^2 dt, and a
// Monte Carlo estimate of the same solution through the inverse stochastic flow.
//
// The state is kept band-limited to |k|_inf <= n/3. Coefficient fields of
// bandwidth below n/6 then multiply it without aliasing, so derivatives,
// products and L^2 norms are exact on the grid and only time stepping errs.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vlab/noise_model.hpp"
#include "vlab/parallel.hpp"
#include "vlab/stats.hpp"
#include "vlab/trig_poly.hpp"
#include "vlab/vortex_dynamics.hpp"

namespace vlab {

/// Real field sampled at x = (i1/n, i2/n); storage index i1 * n + i2.
class ScalarGridField {
 public:
  ScalarGridField() = default;
  explicit ScalarGridField(int n, double fill = 0.0) : n_(n), v_(static_cast<std::size_t>(n) * n, fill) {
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("ScalarGridField: n must be a power of two >= 2");
  }

  template <class F>
  static ScalarGridField sample(int n, F&& f) {
    ScalarGridField g(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = f(Vec2{static_cast<double>(i) / n, static_cast<double>(j) / n});
    return g;
  }

  int n() const { return n_; }
  double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * n_ + j]; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  double mean() const {
    double s = 0.0;
    for (double x : v_) s += x;
    return s / static_cast<double>(v_.size());
  }
  /// Grid L^2 norm squared (exact for band-limited fields).
  double l2_norm_sq() const {
    double s = 0.0;
    for (double x : v_) s += x * x;
    return s / static_cast<double>(v_.size());
  }
  double min() const { return *std::min_element(v_.begin(), v_.end()); }
  double max() const { return *std::max_element(v_.begin(), v_.end()); }
  double sup_abs() const { return std::max(std::abs(min()), std::abs(max())); }

  /// Raw little-endian float64, row-major, plus a JSON sidecar {n, t}.
  void write_bin(const std::string& path, double t) const {
    std::ofstream os(path, std::ios::binary);
    for (double x : v_) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      unsigned char b[8];
      for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
      os.write(reinterpret_cast<const char*>(b), 8);
    }
    std::ofstream js(path + ".json");
    js << nlohmann::json{{"n", n_}, {"t", t}}.dump() << '\n';
  }

 private:
  int n_ = 0;
  std::vector<double> v_;
};

/// Two-dimensional complex FFT on an n x n grid (FFTW).
class Fft2d {
 public:
  explicit Fft2d(int n) : n_(n), buf_(static_cast<std::size_t>(n) * n) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    fwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int n() const { return n_; }

  /// Coefficients c_k with f(x) = sum_k c_k exp(2 pi i k.x).
  std::vector<cplx> forward(const ScalarGridField& f) {
    for (std::size_t i = 0; i < buf_.size(); ++i) buf_[i] = f.data()[i];
    fftw_execute(fwd_);
    const double s = 1.0 / static_cast<double>(buf_.size());
    std::vector<cplx> out(buf_.size());
    for (std::size_t i = 0; i < buf_.size(); ++i) out[i] = s * buf_[i];
    return out;
  }

  ScalarGridField inverse(const std::vector<cplx>& c) {
    std::copy(c.begin(), c.end(), buf_.begin());
    fftw_execute(bwd_);
    ScalarGridField f(n_);
    for (std::size_t i = 0; i < buf_.size(); ++i) f.data()[i] = buf_[i].real();
    return f;
  }

  /// Signed wavenumber of index i (Nyquist index maps to -n/2).
  int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }

 private:
  static std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  std::vector<cplx> buf_;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

/// Spectral L^2 norm squared (Parseval) of a grid field.
inline double spectral_l2_norm_sq(const ScalarGridField& f) {
  Fft2d fft(f.n());
  double s = 0.0;
  for (const auto& c : fft.forward(f)) s += std::norm(c);
  return s;
}

/// Trigonometric interpolant of the grid field evaluated at x.
inline double spectral_eval(const std::vector<cplx>& coeffs, int n, const Vec2& x) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k1 = i < n / 2 ? i : i - n;
    if (2 * std::abs(k1) == n) continue;
    for (int j = 0; j < n; ++j) {
      const int k2 = j < n / 2 ? j : j - n;
      if (2 * std::abs(k2) == n) continue;
      const cplx c = coeffs[static_cast<std::size_t>(i) * n + j];
      const double th = kTwoPi * (k1 * x.x + k2 * x.y);
      s += c.real() * std::cos(th) - c.imag() * std::sin(th);
    }
  }
  return s;
}

struct CflViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DensityOptions {
  int n = 64;
  double T = 0.1;
  double dt = 1e-4;
  double cfl_c = 0.5;
  bool enforce_cfl = true;
  std::size_t snapshot_every = 0;  // 0: only the initial and final fields
};

struct CflReport {
  double dt = 0.0;
  double dt_max = 0.0;  // c * min(1/(n max|b|), 1/(n^2 max Q))
  double max_b = 0.0;
  double max_q = 0.0;
  bool ok = true;
};

struct DensitySeries {
  std::vector<double> times;
  std::vector<ScalarGridField> snapshots;
  std::vector<double> norm_sq;        // ||u_t||^2 at every step
  std::vector<double> grad_energy_rate;  // sum_k ||sigma_k.grad u_t||^2 at every step
  double gradient_energy = 0.0;       // trapezoid integral of the rate
  double mass0 = 0.0, mass_drift = 0.0;  // max |mean(u_t) - mean(u_0)|
  double min0 = 0.0, max0 = 0.0;
  double max_principle_excess = 0.0;  // largest excursion outside [min u0, max u0] on the grid
  double sup0 = 0.0;                  // ||u_0||_inf on the grid
  CflReport cfl;
  int n = 0;
  double dt = 0.0;
};

class TransportDiffusionSolver {
 public:
  TransportDiffusionSolver(const TrigField& drift, const NoiseBasis& basis, int n) : n_(n), fft_(n) {
    if (!drift.is_divergence_free(1e-10)) throw std::invalid_argument("evolve_density: drift must be divergence-free");
    int band = drift.bandwidth();
    for (const auto& f : basis.fields()) band = std::max(band, f.field.bandwidth());
    if (6 * band >= n) throw std::invalid_argument("evolve_density: grid does not resolve the coefficient fields");
    b1_ = ScalarGridField::sample(n, [&](const Vec2& x) { return drift.u(x); });
    b2_ = ScalarGridField::sample(n, [&](const Vec2& x) { return drift.v(x); });
    for (const auto& f : basis.fields()) {
      s1_.push_back(ScalarGridField::sample(n, [&](const Vec2& x) { return f.value(x).x; }));
      s2_.push_back(ScalarGridField::sample(n, [&](const Vec2& x) { return f.value(x).y; }));
    }
  }

  int n() const { return n_; }

  CflReport cfl(double dt, double c) const {
    CflReport r;
    r.dt = dt;
    for (std::size_t i = 0; i < b1_.data().size(); ++i) {
      r.max_b = std::max(r.max_b, std::hypot(b1_.data()[i], b2_.data()[i]));
      double q11 = 0.0, q12 = 0.0, q22 = 0.0;
      for (std::size_t k = 0; k < s1_.size(); ++k) {
        const double a = s1_[k].data()[i], b = s2_[k].data()[i];
        q11 += a * a;
        q12 += a * b;
        q22 += b * b;
      }
      const double tr = q11 + q22;
      const double det = q11 * q22 - q12 * q12;
      r.max_q = std::max(r.max_q, 0.5 * tr + std::sqrt(std::max(0.0, 0.25 * tr * tr - det)));
    }
    const double nn = static_cast<double>(n_);
    double lim = std::numeric_limits<double>::infinity();
    if (r.max_b > 0.0) lim = std::min(lim, 1.0 / (nn * r.max_b));
    if (r.max_q > 0.0) lim = std::min(lim, 1.0 / (nn * nn * r.max_q));
    r.dt_max = c * lim;
    r.ok = dt <= r.dt_max * (1.0 + 1e-12);
    return r;
  }

  /// Smallest eigenvalue of Q(x,x) over the grid (> 0: elliptic everywhere).
  double min_span_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b1_.data().size(); ++i) {
      double q11 = 0.0, q12 = 0.0, q22 = 0.0;
      for (std::size_t k = 0; k < s1_.size(); ++k) {
        const double a = s1_[k].data()[i], b = s2_[k].data()[i];
        q11 += a * a;
        q12 += a * b;
        q22 += b * b;
      }
      const double tr = q11 + q22;
      const double det = q11 * q22 - q12 * q12;
      m = std::min(m, 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det)));
    }
    return m;
  }

  /// Project onto |k|_inf <= n/3.
  ScalarGridField truncate(const ScalarGridField& u) {
    auto c = fft_.forward(u);
    apply_truncation(c);
    return fft_.inverse(c);
  }

  /// sum_k ||sigma_k.grad u||^2 for band-limited u.
  double gradient_rate(const ScalarGridField& u) {
    ScalarGridField d1, d2;
    gradient(u, d1, d2);
    double s = 0.0;
    for (std::size_t k = 0; k < s1_.size(); ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < d1.data().size(); ++i) {
        const double f = s1_[k].data()[i] * d1.data()[i] + s2_[k].data()[i] * d2.data()[i];
        acc += f * f;
      }
      s += acc / static_cast<double>(d1.data().size());
    }
    return s;
  }

  /// Right-hand side, projected back onto the retained band.
  ScalarGridField rhs(const ScalarGridField& u) {
    ScalarGridField d1, d2;
    gradient(u, d1, d2);
    ScalarGridField out(n_);
    auto& o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = -(b1_.data()[i] * d1.data()[i] + b2_.data()[i] * d2.data()[i]);
    ScalarGridField f(n_), e1, e2;
    for (std::size_t k = 0; k < s1_.size(); ++k) {
      for (std::size_t i = 0; i < o.size(); ++i)
        f.data()[i] = s1_[k].data()[i] * d1.data()[i] + s2_[k].data()[i] * d2.data()[i];
      gradient(f, e1, e2);
      for (std::size_t i = 0; i < o.size(); ++i)
        o[i] += 0.5 * (s1_[k].data()[i] * e1.data()[i] + s2_[k].data()[i] * e2.data()[i]);
    }
    return truncate(out);
  }

  std::vector<cplx> coefficients(const ScalarGridField& u) { return fft_.forward(u); }

 private:
  void apply_truncation(std::vector<cplx>& c) const {
    const int keep = n_ / 3;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (std::abs(fft_.wavenumber(i)) > keep || std::abs(fft_.wavenumber(j)) > keep)
          c[static_cast<std::size_t>(i) * n_ + j] = 0.0;
  }

  void gradient(const ScalarGridField& u, ScalarGridField& d1, ScalarGridField& d2) {
    const auto c = fft_.forward(u);
    std::vector<cplx> c1(c.size()), c2(c.size());
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const int k1 = fft_.wavenumber(i), k2 = fft_.wavenumber(j);
        const std::size_t idx = static_cast<std::size_t>(i) * n_ + j;
        c1[idx] = 2 * std::abs(k1) == n_ ? 0.0 : cplx{0.0, kTwoPi * k1} * c[idx];
        c2[idx] = 2 * std::abs(k2) == n_ ? 0.0 : cplx{0.0, kTwoPi * k2} * c[idx];
      }
    d1 = fft_.inverse(c1);
    d2 = fft_.inverse(c2);
  }

  int n_;
  Fft2d fft_;
  ScalarGridField b1_, b2_;
  std::vector<ScalarGridField> s1_, s2_;
};

namespace detail {

inline ScalarGridField axpy(const ScalarGridField& x, double a, const ScalarGridField& y) {
  ScalarGridField r = x;
  for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] += a * y.data()[i];
  return r;
}

}  // namespace detail

/// Classical RK4 for the band-limited semidiscretization.
inline DensitySeries evolve_density(const ScalarGridField& u0_in, const TrigField& drift, const NoiseBasis& basis,
                                    const DensityOptions& opt) {
  if (u0_in.n() != opt.n) throw std::invalid_argument("evolve_density: grid size mismatch");
  TransportDiffusionSolver solver(drift, basis, opt.n);
  DensitySeries s;
  s.n = opt.n;
  s.dt = opt.dt;
  s.cfl = solver.cfl(opt.dt, opt.cfl_c);
  if (!s.cfl.ok && opt.enforce_cfl)
    throw CflViolation("evolve_density: dt = " + std::to_string(opt.dt) + " exceeds CFL limit " + std::to_string(s.cfl.dt_max));

  ScalarGridField u = solver.truncate(u0_in);
  const std::size_t steps = static_cast<std::size_t>(std::llround(opt.T / opt.dt));
  s.mass0 = u.mean();
  s.min0 = u.min();
  s.max0 = u.max();
  s.sup0 = u.sup_abs();
  const double norm0 = u.l2_norm_sq();
  s.times.push_back(0.0);
  s.snapshots.push_back(u);
  s.norm_sq.push_back(norm0);
  s.grad_energy_rate.push_back(solver.gradient_rate(u));
  for (std::size_t n = 0; n < steps; ++n) {
    const double h = opt.dt;
    const auto k1 = solver.rhs(u);
    const auto k2 = solver.rhs(detail::axpy(u, 0.5 * h, k1));
    const auto k3 = solver.rhs(detail::axpy(u, 0.5 * h, k2));
    const auto k4 = solver.rhs(detail::axpy(u, h, k3));
    for (std::size_t i = 0; i < u.data().size(); ++i)
      u.data()[i] += h / 6.0 * (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]);
    const double nsq = u.l2_norm_sq();
    if (!std::isfinite(nsq) || nsq > 100.0 * std::max(norm0, 1e-300))
      throw BlowUp("evolve_density: norm grew beyond 10x its initial value at step " + std::to_string(n + 1));
    s.norm_sq.push_back(nsq);
    s.grad_energy_rate.push_back(solver.gradient_rate(u));
    s.gradient_energy += 0.5 * h * (s.grad_energy_rate[n] + s.grad_energy_rate[n + 1]);
    s.mass_drift = std::max(s.mass_drift, std::abs(u.mean() - s.mass0));
    s.max_principle_excess = std::max({s.max_principle_excess, u.max() - s.max0, s.min0 - u.min()});
    const bool last = n + 1 == steps;
    if (last || (opt.snapshot_every > 0 && (n + 1) % opt.snapshot_every == 0)) {
      s.times.push_back(static_cast<double>(n + 1) * h);
      s.snapshots.push_back(u);
    }
  }
  return s;
}

/// Gradient energy recomputed from stored snapshots (trapezoid in time).
/// Requires snapshots on a uniform time grid.
inline double gradient_energy(const DensitySeries& series, const TrigField& drift, const NoiseBasis& basis) {
  if (series.snapshots.size() < 2) return 0.0;
  TransportDiffusionSolver solver(drift, basis, series.n);
  double e = 0.0;
  double prev = solver.gradient_rate(series.snapshots[0]);
  for (std::size_t i = 1; i < series.snapshots.size(); ++i) {
    const double cur = solver.gradient_rate(series.snapshots[i]);
    e += 0.5 * (series.times[i] - series.times[i - 1]) * (prev + cur);
    prev = cur;
  }
  return e;
}

struct EnergyIdentityReport {
  double lhs = 0.0;       // sum_k int ||sigma_k.grad u||^2 dt
  double rhs = 0.0;       // ||u_0||^2 - ||u_T||^2
  double mismatch = 0.0;  // |lhs - rhs| / ||u_0||^2
  double bound = 0.0;     // ||u_0||_inf^2
  double slack = 0.0;     // bound - lhs
  bool bound_ok = false;
  double min_span_eigenvalue = 0.0;
  double mass_drift = 0.0;
  double max_principle_excess = 0.0;
  CflReport cfl;

  nlohmann::json to_json() const {
    return {{"lhs", lhs},
            {"rhs", rhs},
            {"mismatch", mismatch},
            {"bound", bound},
            {"slack", slack},
            {"bound_ok", bound_ok},
            {"min_span_eigenvalue", min_span_eigenvalue},
            {"mass_drift", mass_drift},
            {"max_principle_excess", max_principle_excess},
            {"cfl", {{"dt", cfl.dt}, {"dt_max", cfl.dt_max}, {"ok", cfl.ok}}}};
  }
};

inline EnergyIdentityReport energy_identity_report(const ScalarGridField& u0, const TrigField& drift,
                                                   const NoiseBasis& basis, const DensityOptions& opt,
                                                   DensitySeries* keep = nullptr) {
  auto s = evolve_density(u0, drift, basis, opt);
  EnergyIdentityReport r;
  r.lhs = s.gradient_energy;
  r.rhs = s.norm_sq.front() - s.norm_sq.back();
  r.mismatch = std::abs(r.lhs - r.rhs) / s.norm_sq.front();
  r.bound = s.sup0 * s.sup0;
  r.slack = r.bound - r.lhs;
  r.bound_ok = r.lhs <= r.bound;
  r.min_span_eigenvalue = TransportDiffusionSolver(drift, basis, opt.n).min_span_eigenvalue();
  r.mass_drift = s.mass_drift;
  r.max_principle_excess = s.max_principle_excess;
  r.cfl = s.cfl;
  if (keep) *keep = std::move(s);
  return r;
}

struct BackwardFlowEstimate {
  Vec2 x;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t trajectories = 0;
  std::size_t aborted = 0;
};

/// E v0(X_t^{-1}(x)) from the flow with negated drift (intensities negated)
/// and fresh increments; the first vortex starts at each sample point, the
/// remaining ones at `companions`. Statistical evidence only for N >= 2.
template <class V0>
std::vector<BackwardFlowEstimate> backward_flow_mc(V0&& v0, const std::vector<Vec2>& points,
                                                   const std::vector<double>& intensities,
                                                   const std::vector<TorusPoint>& companions, const SdeParams& params,
                                                   std::size_t trajectories, int threads = 0) {
  if (intensities.size() != companions.size() + 1)
    throw std::invalid_argument("backward_flow_mc: need one intensity per vortex");
  std::vector<double> neg(intensities.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -intensities[i];
  const VortexSystem sys(params);
  std::vector<BackwardFlowEstimate> out;
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<TorusPoint> x0{TorusPoint(points[p])};
    x0.insert(x0.end(), companions.begin(), companions.end());
    const VortexConfiguration c0(neg, x0);
    const auto vals = parallel_map(
        trajectories,
        [&](std::size_t t) -> std::pair<bool, double> {
          const auto idx = static_cast<std::uint32_t>(p * trajectories + t);
          VortexConfiguration last = c0;
          const auto st = sys.integrate(c0, brownian_source(params.seed, idx, params.dt, RngDomain::kBackwardFlow),
                                        [&](std::size_t, double, const VortexConfiguration& c) { last = c; });
          return {st.ok, st.ok ? v0(last) : 0.0};
        },
        threads);
    BackwardFlowEstimate e;
    e.x = points[p];
    stats::RunningStats s;
    for (const auto& [ok, v] : vals) {
      if (ok)
        s.add(v);
      else
        ++e.aborted;
    }
    e.mean = s.mean();
    e.stderr_ = s.stderr_mean();
    e.trajectories = s.count();
    out.push_back(e);
  }
  return out;
}

}  // namespace vlab
