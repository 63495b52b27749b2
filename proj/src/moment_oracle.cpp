#include "picardlab/moment_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "picardlab/harmonics.hpp"
#include "picardlab/parallel.hpp"
#include "picardlab/picard_sphere.hpp"

namespace picardlab {

PairMomentTable::PairMomentTable(int max_degree, int quad_nodes)
    : max_degree_(max_degree), rule_(gauss_legendre(quad_nodes)) {
  if (max_degree < 0) throw std::invalid_argument("PairMomentTable: negative degree");
  const std::size_t J = rule_.nodes.size();
  p_.assign(static_cast<std::size_t>(max_degree + 1) * J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    const double c = rule_.nodes[j];
    double pm = 1.0, p = c;
    p_[j] = 1.0;
    if (max_degree >= 1) p_[J + j] = c;
    for (int n = 2; n <= max_degree; ++n) {
      const double next = ((2.0 * n - 1.0) * c * p - (n - 1.0) * pm) / n;
      pm = p;
      p = next;
      p_[static_cast<std::size_t>(n) * J + j] = p;
    }
  }
}

double PairMomentTable::operator()(int n0, int n1, int n2) const {
  if (std::max({n0, n1, n2}) > max_degree_) throw std::out_of_range("PairMomentTable: degree above table");
  if (std::abs(n0 - n1) > 2 * n2 || (n0 + n1) % 2 != 0) return 0.0;
  if (2 * static_cast<int>(rule_.nodes.size()) - 1 < n0 + n1 + 2 * n2) {
    throw std::invalid_argument("PairMomentTable: too few quadrature nodes for this triple");
  }
  const double* a = row(n0);
  const double* b = row(n1);
  const double* q = row(n2);
  const double mean = 1.0 / (2.0 * n2 + 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule_.nodes.size(); ++j) acc += rule_.weights[j] * a[j] * b[j] * (q[j] * q[j] - mean);
  return 0.5 * (2.0 * n0 + 1.0) * acc;
}

namespace moments {

int min_quad_nodes(int n0, int n1, int n2) { return 2 * (n0 + n1 + 2 * n2) + 2; }

double pair_moment(int n0, int n1, int n2, int quad_nodes) {
  if (n0 < 0 || n1 < 0 || n2 < 0) throw std::invalid_argument("pair_moment: degrees must be >= 0");
  if (quad_nodes < min_quad_nodes(n0, n1, n2)) {
    throw std::invalid_argument("pair_moment: need at least " + std::to_string(min_quad_nodes(n0, n1, n2)) +
                                " quadrature nodes");
  }
  const auto rule = gauss_legendre(quad_nodes);
  const double mean = 1.0 / (2.0 * n2 + 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double c = rule.nodes[j];
    const double q = harmonics::legendre_polynomial(n2, c);
    acc += rule.weights[j] * harmonics::legendre_polynomial(n0, c) * harmonics::legendre_polynomial(n1, c) *
           (q * q - mean);
  }
  return 0.5 * (2.0 * n0 + 1.0) * acc;
}

IISecondMoment expected_II_sq(double t, double alpha, int N, int n2_max, int threads) {
  const int c = harmonics::cluster_cutoff(N);
  const int top2 = n2_max < 0 ? c : std::min(n2_max, c);
  const int deg = c + 2 * top2;
  const PairMomentTable table(deg, min_quad_nodes(deg, c, top2));

  // per n1 slots, reduced in order afterwards
  std::vector<IISecondMoment> slots(static_cast<std::size_t>(c) + 1);
  parallel_for(slots.size(), threads, [&](std::size_t idx) {
    const int n1 = static_cast<int>(idx);
    const double l1 = harmonics::eigenvalue(n1);
    IISecondMoment acc;
    for (int n2 = 0; n2 <= top2; ++n2) {
      if (n2 == n1) continue;
      const double l2 = harmonics::eigenvalue(n2);
      const double amp = 4.0 * std::pow(l1 * l2 * l2, -2.0 * (alpha - 0.5));
      for (int n0 = n1 >= 2 * n2 ? n1 - 2 * n2 : n1 % 2; n0 <= n1 + 2 * n2; n0 += 2) {
        const double T = table(n0, n1, n2);
        if (T == 0.0) continue;
        const std::int64_t omega = harmonics::eigenvalue_sq(n0) - harmonics::eigenvalue_sq(n1);
        const double term = std::pow(static_cast<double>(harmonics::eigenvalue_sq(n0)), alpha - 1.0) * amp *
                            std::norm(picard::time_factor(t, omega)) * T;
        acc.total += term;
        if (n0 == n1) acc.resonant += term;
      }
    }
    slots[idx] = acc;
  });
  IISecondMoment out;
  for (const auto& s : slots) {
    out.total += s.total;
    out.resonant += s.resonant;
  }
  return out;
}

double equatorial_weight(int n, int k) {
  const double nn = n, kk = k;
  double a = ((nn + 1.0) * (nn + 1.0) - kk * kk) / ((2.0 * nn + 1.0) * (2.0 * nn + 3.0));
  if (n > 0) a += (nn * nn - kk * kk) / ((2.0 * nn - 1.0) * (2.0 * nn + 1.0));
  return a;
}

double equatorial_term(int n, int k) {
  const double A = equatorial_weight(n, k);
  return A * A + 0.5 * (1.0 - A) * (1.0 - A) - 1.0 / 3.0;
}

double equatorial_diagnostic(int N) {
  double total = 0.0;
  for (int n = 2; n <= N; ++n) {
    double row = 0.0;
    for (int k = -n; k <= n; ++k) row += equatorial_term(n, k);
    total += row / (static_cast<double>(n) * n);
  }
  return total;
}

}  // namespace moments
}  // namespace picardlab
