// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vlab/configuration.hpp"
#include "vlab/torus_spectral.hpp"
#include "vlab/trig_poly.hpp"

namespace vlab {

/// A finite signed measure sum_i w_i delta_{x_i} on the torus. Built from a
/// vortex configuration it is omega = N^{-1/2} sum_i xi_i delta_{X_i}; sums
/// and scalar multiples stay in the same class, which is what directional
/// derivatives of functionals need.
class PointVorticity {
 public:
  PointVorticity() = default;

  explicit PointVorticity(const VortexConfiguration& config) : x_(config.positions()) {
    if (config.empty()) throw std::invalid_argument("PointVorticity: empty configuration");
    const double s = 1.0 / std::sqrt(static_cast<double>(config.size()));
    w_.reserve(config.size());
    for (double xi : config.intensities()) w_.push_back(s * xi);
  }

  PointVorticity(std::vector<double> weights, std::vector<TorusPoint> atoms) : w_(std::move(weights)), x_(std::move(atoms)) {
    if (w_.size() != x_.size()) throw std::invalid_argument("PointVorticity: size mismatch");
  }

  std::size_t size() const { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<TorusPoint>& atoms() const { return x_; }

  /// <omega, phi> for any callable phi(Vec2) -> double.
  template <class F>
  double pair(F&& phi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) s += w_[i] * phi(x_[i].vec());
    return s;
  }
  double pairing(const TrigPoly& phi) const { return pair([&](const Vec2& x) { return phi(x); }); }

  /// <omega, 1>
  double total() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
  }

  /// <omega (x) omega, f> = sum_{i,j} w_i w_j f(x_i, x_j), diagonal included.
  template <class F>
  double quadratic(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < w_.size(); ++j) row += w_[j] * f(x_[i].vec(), x_[j].vec());
      s += w_[i] * row;
    }
    return s;
  }

  /// eta_k = <omega, exp(2 pi i k.x)>
  cplx eta(const Mode& k) const {
    cplx s{};
    for (std::size_t i = 0; i < w_.size(); ++i) s += w_[i] * std::polar(1.0, phase(k, x_[i]));
    return s;
  }

  /// Fourier coefficients omega^(k) = <omega, exp(-2 pi i k.x)> for 0 < |k|_inf <= M.
  FourierCoeffTable coeffs(int M) const {
    FourierCoeffTable t;
    t.M = M;
    for (int a = -M; a <= M; ++a)
      for (int b = -M; b <= M; ++b)
        if (a != 0 || b != 0) t.coeffs[Mode{a, b}] = std::conj(eta(Mode{a, b}));
    return t;
  }

  PointVorticity scaled(double s) const {
    PointVorticity p = *this;
    for (double& w : p.w_) w *= s;
    return p;
  }

  /// Sum of measures (atoms concatenated).
  friend PointVorticity operator+(const PointVorticity& a, const PointVorticity& b) {
    PointVorticity p = a;
    p.w_.insert(p.w_.end(), b.w_.begin(), b.w_.end());
    p.x_.insert(p.x_.end(), b.x_.begin(), b.x_.end());
    return p;
  }

 private:
  std::vector<double> w_;
  std::vector<TorusPoint> x_;
};

}  // namespace vlab
