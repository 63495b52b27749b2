#pragma once

#include <vector>

#include "picardlab/quadrature.hpp"

namespace picardlab {

/// T(n0, n1, n2) = E ||pi_{n0}(e_{n1} W_{n2})||^2, W the Wick square.
struct PairMoment {
  int n0 = 0, n1 = 0, n2 = 0;
  double value = 0.0;
};

/// Legendre values P_n at one Gauss-Legendre node set, for n <= max_degree.
class PairMomentTable {
 public:
  PairMomentTable(int max_degree, int quad_nodes);

  int max_degree() const { return max_degree_; }
  double operator()(int n0, int n1, int n2) const;

 private:
  int max_degree_;
  GaussLegendreRule rule_;
  std::vector<double> p_;  // p_[n * nodes + j]
  const double* row(int n) const { return p_.data() + static_cast<std::size_t>(n) * rule_.nodes.size(); }
};

namespace moments {

/// (1/2) int (2n0+1) P_{n0} P_{n1} [P_{n2}^2 - 1/(2n2+1)] dc by Gauss-Legendre.
double pair_moment(int n0, int n1, int n2, int quad_nodes);
int min_quad_nodes(int n0, int n1, int n2);

struct IISecondMoment {
  double total = 0.0;
  double resonant = 0.0;  // n0 = n1 terms, where the phase vanishes
};

/// E ||II_N||^2_{H^{alpha-1}} in closed form. n2_max < 0 keeps every n2.
IISecondMoment expected_II_sq(double t, double alpha, int N, int n2_max = -1, int threads = 1);

/// A(n,k) = (1/2) int v_{n,k}^2 c^2 dc in closed form.
double equatorial_weight(int n, int k);
/// E |int W_1 |Y_{n,k}|^2 dsigma|^2.
double equatorial_term(int n, int k);
/// D_N = sum_{n=2}^{N} n^{-2} sum_{|k|<=n} equatorial_term(n, k).
double equatorial_diagnostic(int N);

}  // namespace moments
}  // namespace picardlab
