#include "picardlab/concentration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "picardlab/parallel.hpp"
#include "picardlab/quadrature.hpp"

namespace picardlab {

BandSpec::BandSpec(double d) : delta(d) {
  if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("BandSpec: delta must lie in (0, 1)");
}

namespace concentration {

namespace {

double profile_sq(int n, int k, double c) {
  const double v = harmonics::normalized_legendre(n, std::abs(k), c);
  return v * v;
}

double abs_power_integral(int n, int k, double p, int nodes) {
  const auto rule = gauss_legendre(nodes, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    acc += rule.weights[j] * std::pow(std::abs(harmonics::normalized_legendre(n, std::abs(k), rule.nodes[j])), p);
  }
  return acc;  // (1/2) int_{-1}^{1} by symmetry of |v|
}

}  // namespace

double band_mass(const HarmonicIndex& idx, const BandSpec& band) {
  // v^2 is an even polynomial of degree 2n in c
  const auto rule = gauss_legendre(idx.n() + 1, band.delta, 1.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) acc += rule.weights[j] * profile_sq(idx.n(), idx.k(), rule.nodes[j]);
  return acc;
}

int window_edge(int n, const BandSpec& band) {
  const double target = static_cast<double>(n) * (n + 1.0) * (1.0 - band.delta * band.delta);
  int k = static_cast<int>(std::ceil(std::sqrt(target)));
  while (k > 0 && static_cast<double>(k - 1) * (k - 1) >= target) --k;
  while (static_cast<double>(k) * k < target) ++k;
  return k;
}

ConcentrationScan concentration_scan(const BandSpec& band, const std::vector<int>& n_list, int threads) {
  if (!(2.0 * band.delta < 1.0)) throw std::invalid_argument("concentration_scan: delta must be below 1/2");
  const BandSpec doubled(2.0 * band.delta);
  if (n_list.size() < 2) throw std::invalid_argument("concentration_scan: need at least two degrees");
  ConcentrationScan scan;
  scan.delta = band.delta;
  scan.rows.resize(n_list.size());
  for (int n : n_list) {
    if (n < 1 || window_edge(n, band) > n) {
      throw std::invalid_argument("concentration_scan: empty window at n = " + std::to_string(n));
    }
  }
  parallel_for(n_list.size(), threads, [&](std::size_t i) {
    ScanRow r;
    r.n = n_list[i];
    r.k_edge = window_edge(r.n, band);
    r.mass_edge = band_mass({r.n, r.k_edge}, doubled);
    r.mass_top = band_mass({r.n, r.n}, doubled);
    r.mass_edge_turn = band_mass({r.n, r.k_edge}, band);
    scan.rows[i] = r;
  });
  std::vector<double> x, ye, yt;
  for (const auto& r : scan.rows) {
    if (!(r.mass_edge > 0.0 && r.mass_top > 0.0)) {
      throw std::invalid_argument("concentration_scan: mass underflow at n = " + std::to_string(r.n));
    }
    x.push_back(std::log(r.n));
    ye.push_back(std::log(r.mass_edge));
    yt.push_back(std::log(r.mass_top));
  }
  scan.edge_fit = fit_linear(x, ye);
  scan.top_fit = fit_linear(x, yt);
  return scan;
}

double lp_norm(const HarmonicIndex& idx, double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("lp_norm: p must be >= 2");
  const int n = idx.n();
  if (p == std::floor(p) && static_cast<long long>(p) % 2 == 0) {
    // |v|^p is a polynomial of degree p n
    const int nodes = static_cast<int>(p) * n / 2 + 1;
    return std::pow(abs_power_integral(n, idx.k(), p, nodes), 1.0 / p);
  }
  int nodes = static_cast<int>(std::ceil(p * n / 2.0)) + 8;
  double prev = std::pow(abs_power_integral(n, idx.k(), p, nodes), 1.0 / p);
  for (int iter = 0; iter < 12; ++iter) {
    nodes *= 2;
    const double cur = std::pow(abs_power_integral(n, idx.k(), p, nodes), 1.0 / p);
    if (std::abs(cur - prev) <= 1e-6 * std::abs(cur)) return cur;
    prev = cur;
  }
  throw std::runtime_error("lp_norm: quadrature did not stabilize");
}

}  // namespace concentration
}  // namespace picardlab
