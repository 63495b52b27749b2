#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace picardlab {

/// Sample mean with its standard error (sample standard deviation / sqrt(count)).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;

  /// |mean - target| <= sigmas * std_error
  bool within(double target, double sigmas) const {
    return std::abs(mean - target) <= sigmas * std_error;
  }
};

inline Estimate estimate(std::span<const double> xs) {
  Estimate e;
  if (xs.empty()) return e;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  e.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  double slope_std_error = 0.0;
};

inline LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_linear: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_linear: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_linear: x has no spread");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) f.slope_std_error = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

}  // namespace picardlab
