// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <numbers>

namespace vlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Plain real 2-vector used for velocities, displacements and gradients.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Row-major 2x2 matrix; m[r][c].
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{};

  constexpr double operator()(int r, int c) const { return m[r][c]; }
  constexpr double& operator()(int r, int c) { return m[r][c]; }

  constexpr Mat2& operator+=(const Mat2& o) {
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m[r][c] += o.m[r][c];
    return *this;
  }
  constexpr Mat2 transposed() const { return Mat2{{{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}}; }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

constexpr Mat2 outer(const Vec2& a, const Vec2& b) {
  return Mat2{{{{a.x * b.x, a.x * b.y}, {a.y * b.x, a.y * b.y}}}};
}
constexpr Vec2 operator*(const Mat2& a, const Vec2& v) {
  return {a.m[0][0] * v.x + a.m[0][1] * v.y, a.m[1][0] * v.x + a.m[1][1] * v.y};
}

/// Reduce a real coordinate into [0, 1).
inline double wrap_unit(double v) {
  double r = v - std::floor(v);
  // v slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r + 0.0;  // drops a negative zero
}

/// Nearest periodic image of a displacement: each component in [-1/2, 1/2).
inline Vec2 min_image(Vec2 d) {
  d.x -= std::floor(d.x + 0.5);
  d.y -= std::floor(d.y + 0.5);
  return d;
}

/// A point of the unit torus R^2/Z^2; coordinates are always in [0,1).
class TorusPoint {
 public:
  constexpr TorusPoint() = default;
  TorusPoint(double x1, double x2) : x1_(wrap_unit(x1)), x2_(wrap_unit(x2)) {}
  explicit TorusPoint(const Vec2& v) : TorusPoint(v.x, v.y) {}

  constexpr double x1() const { return x1_; }
  constexpr double x2() const { return x2_; }
  constexpr Vec2 vec() const { return {x1_, x2_}; }

  /// Translate by a displacement and reduce mod 1.
  TorusPoint shifted(const Vec2& d) const { return TorusPoint(x1_ + d.x, x2_ + d.y); }

  friend constexpr bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  double x1_ = 0.0;
  double x2_ = 0.0;
};

/// Raw (unreduced) coordinate difference a - b.
constexpr Vec2 operator-(const TorusPoint& a, const TorusPoint& b) {
  return {a.x1() - b.x1(), a.x2() - b.x2()};
}

/// Periodic distance: minimum over integer shifts of the Euclidean distance.
inline double periodic_distance(const TorusPoint& a, const TorusPoint& b) {
  return norm(min_image(a - b));
}

/// Lattice mode k in Z^2.
struct Mode {
  int k1 = 0;
  int k2 = 0;

  constexpr long norm_sq() const {
    return static_cast<long>(k1) * k1 + static_cast<long>(k2) * k2;
  }
  double norm() const { return std::sqrt(static_cast<double>(norm_sq())); }
  constexpr int sup_norm() const {
    const int a = k1 < 0 ? -k1 : k1;
    const int b = k2 < 0 ? -k2 : k2;
    return a > b ? a : b;
  }
  constexpr bool is_zero() const { return k1 == 0 && k2 == 0; }
  constexpr Mode operator-() const { return {-k1, -k2}; }
  friend constexpr Mode operator+(Mode a, Mode b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
  /// k-perp = (k2, -k1).
  constexpr Vec2 perp() const { return {static_cast<double>(k2), static_cast<double>(-k1)}; }
  /// Half-lattice membership: k1 > 0, or k1 == 0 and k2 > 0.
  constexpr bool in_half_lattice() const { return k1 > 0 || (k1 == 0 && k2 > 0); }

  friend constexpr auto operator<=>(const Mode&, const Mode&) = default;
};

/// 2 pi k . x
inline double phase(const Mode& k, const Vec2& x) { return kTwoPi * (k.k1 * x.x + k.k2 * x.y); }
inline double phase(const Mode& k, const TorusPoint& x) { return phase(k, x.vec()); }

}  // namespace vlab
