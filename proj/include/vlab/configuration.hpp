// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vlab/torus.hpp"

namespace vlab {

/// Intensities and positions of N point vortices.
class VortexConfiguration {
 public:
  VortexConfiguration() = default;

  VortexConfiguration(std::vector<double> intensities, std::vector<TorusPoint> positions)
      : xi_(std::move(intensities)), x_(std::move(positions)) {
    if (xi_.size() != x_.size()) throw std::invalid_argument("VortexConfiguration: size mismatch");
    for (double v : xi_) {
      if (v == 0.0 || !std::isfinite(v)) throw std::invalid_argument("VortexConfiguration: intensities must be finite and nonzero");
    }
  }

  std::size_t size() const { return xi_.size(); }
  bool empty() const { return xi_.empty(); }

  const std::vector<double>& intensities() const { return xi_; }
  const std::vector<TorusPoint>& positions() const { return x_; }
  double intensity(std::size_t i) const { return xi_[i]; }
  const TorusPoint& position(std::size_t i) const { return x_[i]; }

  /// Replace positions keeping intensities (used by time stepping).
  VortexConfiguration with_positions(std::vector<TorusPoint> positions) const {
    VortexConfiguration c;
    c.xi_ = xi_;
    c.x_ = std::move(positions);
    if (c.x_.size() != c.xi_.size()) throw std::invalid_argument("with_positions: size mismatch");
    return c;
  }

  /// Smallest pairwise periodic distance; +inf when N < 2.
  double min_separation() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x_.size(); ++i)
      for (std::size_t j = i + 1; j < x_.size(); ++j) m = std::min(m, periodic_distance(x_[i], x_[j]));
    return m;
  }

  bool off_diagonal() const { return min_separation() > 0.0; }

  /// Joint permutation of (xi, X).
  VortexConfiguration permuted(const std::vector<std::size_t>& perm) const {
    if (perm.size() != size()) throw std::invalid_argument("permuted: bad permutation length");
    std::vector<double> xi(size());
    std::vector<TorusPoint> x(size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      xi[i] = xi_[perm[i]];
      x[i] = x_[perm[i]];
    }
    return {std::move(xi), std::move(x)};
  }

  nlohmann::json to_json() const {
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& p : x_) pos.push_back({p.x1(), p.x2()});
    return {{"xi", xi_}, {"X", pos}};
  }

  static VortexConfiguration from_json(const nlohmann::json& j) {
    std::vector<TorusPoint> pos;
    for (const auto& p : j.at("X")) pos.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return {j.at("xi").get<std::vector<double>>(), std::move(pos)};
  }

 private:
  std::vector<double> xi_;
  std::vector<TorusPoint> x_;
};

}  // namespace vlab
