// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Stochastic point-vortex dynamics
//   dX_i = N^{-1/2} sum_j xi_j K(X_i - X_j) dt + sum_k sigma_k(X_i) o dW^k
// with a stochastic Heun scheme (Stratonovich) and an Euler scheme for the
// Ito form, plus trajectory records that can be replayed bit for bit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vlab/configuration.hpp"
#include "vlab/noise_model.hpp"
#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"
#include "vlab/stats.hpp"
#include "vlab/torus_spectral.hpp"

namespace vlab {

enum class Scheme { kHeunStratonovich, kEulerIto };

inline std::string to_string(Scheme s) { return s == Scheme::kHeunStratonovich ? "heun-stratonovich" : "euler-ito"; }

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "heun-stratonovich" || s == "heun") return Scheme::kHeunStratonovich;
  if (s == "euler-ito" || s == "euler") return Scheme::kEulerIto;
  throw std::invalid_argument("unknown scheme: " + s);
}

struct SdeParams {
  KernelSpec kernel{};
  NoiseBasis basis{};
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::kHeunStratonovich;
  std::uint64_t seed = 1;
  double separation_floor = 1e-9;

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

  void validate() const {
    kernel.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("SdeParams: dt must be positive");
    if (!(T >= 0.0)) throw std::invalid_argument("SdeParams: T must be nonnegative");
    const double n = T / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
      throw std::invalid_argument("SdeParams: dt must divide T");
  }

  nlohmann::json to_json() const {
    return {{"kernel", kernel.to_json()}, {"basis", basis.to_json()}, {"dt", dt},         {"T", T},
            {"scheme", to_string(scheme)}, {"seed", seed},            {"separation_floor", separation_floor}};
  }
};

/// Supplies the increments for step n of a trajectory.
using IncrementSource = std::function<void(std::uint32_t step, std::vector<double>& dW)>;

/// i.i.d. N(0, dt) increments keyed on (seed, trajectory, step, field).
inline IncrementSource brownian_source(std::uint64_t seed, std::uint32_t trajectory, double dt,
                                       RngDomain domain = RngDomain::kBrownian) {
  return [=](std::uint32_t step, std::vector<double>& dW) { brownian_increments(seed, trajectory, step, dt, dW, domain); };
}

/// Increments over `factor` consecutive fine steps of size fine_dt, summed.
/// Coarse and fine paths then share one Brownian path.
inline IncrementSource coarsened_source(std::uint64_t seed, std::uint32_t trajectory, double fine_dt, std::uint32_t factor) {
  return [=](std::uint32_t step, std::vector<double>& dW) {
    std::vector<double> fine(dW.size());
    std::fill(dW.begin(), dW.end(), 0.0);
    for (std::uint32_t r = 0; r < factor; ++r) {
      brownian_increments(seed, trajectory, step * factor + r, fine_dt, fine);
      for (std::size_t j = 0; j < dW.size(); ++j) dW[j] += fine[j];
    }
  };
}

struct StepStatus {
  bool ok = true;
  double min_separation = std::numeric_limits<double>::infinity();
};

class VortexSystem {
 public:
  explicit VortexSystem(SdeParams params) : params_(std::move(params)), kernel_(params_.kernel) { params_.validate(); }

  const SdeParams& params() const { return params_; }
  const BiotSavartKernel& kernel() const { return kernel_; }
  const NoiseBasis& basis() const { return params_.basis; }

  /// b_i = N^{-1/2} sum_j xi_j K(X_i - X_j); the j = i term is K(0) = 0.
  std::vector<Vec2> drift(const VortexConfiguration& c) const {
    const std::size_t n = c.size();
    std::vector<Vec2> b(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec2 k = kernel_(c.position(i) - c.position(j));  // K(X_j - X_i) = -k
        b[i] += c.intensity(j) * k;
        b[j] -= c.intensity(i) * k;
      }
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : b) v *= s;
    return b;
  }

  /// sum_k sigma_k(X_i) dW^k per vortex.
  std::vector<Vec2> noise(const VortexConfiguration& c, const std::vector<double>& dW) const {
    std::vector<Vec2> s(c.size());
    if (basis().empty()) return s;
    for (std::size_t i = 0; i < c.size(); ++i) s[i] = basis().combine(c.position(i).vec(), dW);
    return s;
  }

  /// One time step from `c` with increments dW.
  VortexConfiguration step(const VortexConfiguration& c, const std::vector<double>& dW, StepStatus* status = nullptr) const {
    if (dW.size() != basis().size()) throw std::invalid_argument("step: |dW| must equal M_noise");
    const double dt = params_.dt;
    const std::size_t n = c.size();
    const auto b0 = drift(c);
    const auto s0 = noise(c, dW);
    std::vector<TorusPoint> next(n);
    if (params_.scheme == Scheme::kEulerIto) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 x = c.position(i).vec();
        Vec2 d = dt * b0[i] + s0[i];
        if (!basis().empty()) d += dt * ito_correction(basis(), x);
        next[i] = c.position(i).shifted(d);
      }
    } else {
      std::vector<TorusPoint> pred(n);
      for (std::size_t i = 0; i < n; ++i) pred[i] = c.position(i).shifted(dt * b0[i] + s0[i]);
      const auto cp = c.with_positions(std::move(pred));
      const auto b1 = drift(cp);
      const auto s1 = noise(cp, dW);
      for (std::size_t i = 0; i < n; ++i)
        next[i] = c.position(i).shifted(0.5 * dt * (b0[i] + b1[i]) + 0.5 * (s0[i] + s1[i]));
    }
    auto out = c.with_positions(std::move(next));
    if (status) {
      status->min_separation = out.min_separation();
      status->ok = !(status->min_separation < params_.separation_floor);
    }
    return out;
  }

  /// Run from c0, calling observer(step_index, t, state) at every grid time
  /// (including t = 0). Stops early on a separation-floor breach.
  template <class Observer>
  StepStatus integrate(const VortexConfiguration& c0, const IncrementSource& source, Observer&& observer,
                       std::vector<double>* dW_log = nullptr, std::vector<double>* min_sep_log = nullptr,
                       std::size_t* completed = nullptr) const {
    const std::size_t steps = params_.steps();
    VortexConfiguration c = c0;
    std::vector<double> dW(basis().size());
    StepStatus st;
    st.min_separation = c.min_separation();
    observer(std::size_t{0}, 0.0, c);
    for (std::size_t n = 0; n < steps; ++n) {
      source(static_cast<std::uint32_t>(n), dW);
      if (dW_log) dW_log->insert(dW_log->end(), dW.begin(), dW.end());
      c = step(c, dW, &st);
      if (min_sep_log) min_sep_log->push_back(st.min_separation);
      if (completed) *completed = n + 1;
      if (!st.ok) return st;
      observer(n + 1, static_cast<double>(n + 1) * params_.dt, c);
    }
    return st;
  }

 private:
  SdeParams params_;
  BiotSavartKernel kernel_;
};

/// Full trajectory with the increments that produced it.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<VortexConfiguration> states;
  std::size_t m_noise = 0;
  std::vector<double> dW;  // step-major, m_noise per step
  std::vector<double> min_separation;
  Scheme scheme = Scheme::kHeunStratonovich;
  bool aborted = false;
  std::string diagnostic;

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
  std::vector<double> increments(std::size_t step) const {
    return {dW.begin() + static_cast<std::ptrdiff_t>(step * m_noise),
            dW.begin() + static_cast<std::ptrdiff_t>((step + 1) * m_noise)};
  }

  /// JSON Lines: one object {t, X, dW} per grid time; dW is the increment
  /// applied from that time (empty at the final time).
  void write_jsonl(std::ostream& os) const {
    for (std::size_t n = 0; n < states.size(); ++n) {
      nlohmann::json pos = nlohmann::json::array();
      for (const auto& p : states[n].positions()) pos.push_back({p.x1(), p.x2()});
      nlohmann::json line{{"t", times[n]}, {"X", pos}, {"dW", n < steps() ? nlohmann::json(increments(n)) : nlohmann::json::array()}};
      os << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict) << '\n';
    }
  }
};

inline TrajectoryRecord record_trajectory(const VortexSystem& sys, const VortexConfiguration& c0,
                                          const IncrementSource& source) {
  TrajectoryRecord r;
  r.m_noise = sys.basis().size();
  r.scheme = sys.params().scheme;
  std::size_t completed = 0;
  const auto st = sys.integrate(
      c0, source,
      [&](std::size_t, double t, const VortexConfiguration& c) {
        r.times.push_back(t);
        r.states.push_back(c);
      },
      &r.dW, &r.min_separation, &completed);
  if (!st.ok) {
    r.aborted = true;
    r.diagnostic = "near-collision: min separation " + std::to_string(st.min_separation) + " below floor at step " +
                   std::to_string(completed);
    r.dW.resize(r.states.size() > 0 ? (r.states.size() - 1) * r.m_noise : 0);
    r.min_separation.resize(r.states.size() > 0 ? r.states.size() - 1 : 0);
  }
  return r;
}

/// Simulate trajectory `trajectory` with increments derived from the seed.
inline TrajectoryRecord simulate(const VortexConfiguration& c0, const SdeParams& params, std::uint32_t trajectory = 0) {
  if (!c0.off_diagonal()) throw std::invalid_argument("simulate: initial configuration lies on the diagonal");
  const VortexSystem sys(params);
  return record_trajectory(sys, c0, brownian_source(params.seed, trajectory, params.dt));
}

/// Re-run a record through the same scheme using its stored increments.
inline TrajectoryRecord replay(const TrajectoryRecord& rec, const SdeParams& params) {
  if (rec.states.empty()) throw std::invalid_argument("replay: empty record");
  if (rec.m_noise != params.basis.size()) throw std::invalid_argument("replay: basis size mismatch");
  const VortexSystem sys(params);
  const IncrementSource src = [&rec](std::uint32_t step, std::vector<double>& dW) { dW = rec.increments(step); };
  return record_trajectory(sys, rec.states.front(), src);
}

/// Initial configuration with the given intensities and positions ~ Leb^N.
inline VortexConfiguration uniform_positions(const std::vector<double>& xi, std::uint64_t seed, std::uint32_t index) {
  CounterStream rng(seed, RngDomain::kInitialPositions, index);
  std::vector<TorusPoint> x(xi.size());
  for (auto& p : x) {
    const double a = rng.uniform();
    p = TorusPoint(a, rng.uniform());
  }
  return {xi, std::move(x)};
}

/// N i.i.d. standard normal intensities, drawn once per seed.
inline std::vector<double> normal_intensities(std::size_t N, std::uint64_t seed) {
  CounterStream rng(seed, RngDomain::kIntensities, 0);
  std::vector<double> xi(N);
  for (auto& v : xi) {
    v = 0.0;
    while (v == 0.0) v = rng.normal();
  }
  return xi;
}

struct IncrementMomentRow {
  std::size_t lag_steps = 0;
  double lag = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

struct IncrementMomentScan {
  std::vector<IncrementMomentRow> rows;
  double slope = 0.0;  // log-log slope of the fourth moment against the lag
};

/// E (Y_{s+L} - Y_s)^4 per lag L, one increment from s = 0 per trajectory.
/// series[i][n] is <omega_{t_n}, phi> along trajectory i.
inline IncrementMomentScan increment_moment_scan(const std::vector<std::vector<double>>& series,
                                                 const std::vector<std::size_t>& lags, double dt) {
  IncrementMomentScan scan;
  std::vector<double> x, y;
  for (std::size_t L : lags) {
    stats::RunningStats s;
    for (const auto& path : series) {
      if (L >= path.size()) throw std::invalid_argument("increment_moment_scan: lag beyond series length");
      const double d = path[L] - path[0];
      s.add(d * d * d * d);
    }
    scan.rows.push_back({L, static_cast<double>(L) * dt, s.mean(), s.stderr_mean(), s.count()});
    if (s.mean() > 0.0) {
      x.push_back(static_cast<double>(L) * dt);
      y.push_back(s.mean());
    }
  }
  if (x.size() >= 2) scan.slope = stats::loglog_slope(x, y);
  return scan;
}

}  // namespace vlab
