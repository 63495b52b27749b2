#include "picardlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace picardlab {

GaussLegendreRule gauss_legendre(int count) {
  if (count < 1) throw std::invalid_argument("gauss_legendre: count must be >= 1");
  GaussLegendreRule rule;
  const auto size = static_cast<std::size_t>(count);
  rule.nodes.resize(size);
  rule.weights.resize(size);
  const double n = count;
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int m = 2; m <= count; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 4e-16) break;
    }
    // refresh derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int m = 2; m <= count; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    dp = (count == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = size - 1 - lo;
    rule.nodes[lo] = x;
    rule.nodes[hi] = -x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (count % 2 == 1) rule.nodes[size / 2] = 0.0;
  return rule;
}

GaussLegendreRule gauss_legendre(int count, double lo, double hi) {
  GaussLegendreRule rule = gauss_legendre(count);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

}  // namespace picardlab
