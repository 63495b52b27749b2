#pragma once

#include <vector>

namespace picardlab {

/// Gauss-Legendre rule on [-1, 1]; nodes in descending order, weights sum to 2.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int count);

/// The same rule affinely mapped to [lo, hi].
GaussLegendreRule gauss_legendre(int count, double lo, double hi);

}  // namespace picardlab
