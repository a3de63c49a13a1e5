// Copyright 2026 vortexlab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace vlab::stats {

/// Running mean and variance (Welford). Merge is exact up to rounding, but
/// callers that need thread-count independent output should merge in a
/// fixed order.
class RunningStats {
 public:
  void add(double v) {
    ++n_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (v - mean_);
  }

  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  /// Standard error of the mean.
  double stderr_mean() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline RunningStats summarize(const std::vector<double>& v) {
  RunningStats s;
  for (double x : v) s.add(x);
  return s;
}

/// Sample covariance of two equally long series.
inline double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("covariance: need two equal series of length >= 2");
  const double ma = summarize(a).mean();
  const double mb = summarize(b).mean();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

/// Survival function of the Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against Uniform[0,1). The p-value uses
/// the asymptotic distribution with Stephens' finite-n correction.
inline TestResult ks_uniform(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_uniform: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double u = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

/// Jarque-Bera normality test; p-value from the chi-square(2) tail exp(-JB/2).
inline TestResult jarque_bera(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 4) throw std::invalid_argument("jarque_bera: need at least 4 samples");
  const double mean = summarize(samples).mean();
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double nn = static_cast<double>(n);
  m2 /= nn;
  m3 /= nn;
  m4 /= nn;
  if (m2 <= 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  const double skew = m3 / std::pow(m2, 1.5);
  const double kurt = m4 / (m2 * m2);
  const double jb = nn / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
  return {jb, std::exp(-0.5 * jb)};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = a + b x.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
  const double mx = summarize(x).mean();
  const double my = summarize(y).mean();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double b = sxy / sxx;
  return {b, my - b * mx};
}

/// Slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  std::transform(x.begin(), x.end(), lx.begin(), [](double v) { return std::log(v); });
  std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
  return linear_fit(lx, ly).slope;
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

/// Two-sided false-alarm probability of a single 3 standard-error band.
inline double three_sigma_alpha() {
  return 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>{}, 3.0));
}

/// Band width (in standard errors) that keeps the family-wise two-sided
/// false-alarm rate of m independent checks at alpha (Sidak).
inline double sidak_band(double alpha, std::size_t m) {
  if (m <= 1) return normal_quantile(1.0 - 0.5 * alpha);
  const double per_test = -std::expm1(std::log1p(-alpha) / static_cast<double>(m));
  return normal_quantile(1.0 - 0.5 * per_test);
}

}  // namespace vlab::stats
