#include "picardlab/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace picardlab::harmonics {

namespace {

// Values are carried as mantissa * 2^(exponent * kScaleBits).
constexpr int kScaleBits = 600;
const double kTiny = std::ldexp(1.0, -300);
const double kHuge = std::ldexp(1.0, 300);

inline double unscale(double p, int e) { return e == 0 ? p : std::ldexp(p, e * kScaleBits); }

template <class Sector, class A, class B>
void column_core(int k, int n_top, double x, double s, std::span<double> out, Sector sector, A a,
                 B b) {
  double p = 1.0;
  int e = 0;
  for (int i = 1; i <= k; ++i) {
    p *= sector(i) * s;
    if (p != 0.0 && std::abs(p) < kTiny) {
      p = std::ldexp(p, kScaleBits);
      --e;
    }
  }
  out[0] = unscale(p, e);
  double prev = 0.0;
  double cur = p;
  for (int n = k + 1; n <= n_top; ++n) {
    double next = a(n) * (x * cur - b(n) * prev);
    prev = cur;
    cur = next;
    if (e < 0 && std::abs(cur) > kHuge) {
      cur = std::ldexp(cur, -kScaleBits);
      prev = std::ldexp(prev, -kScaleBits);
      ++e;
    }
    out[static_cast<std::size_t>(n - k)] = unscale(cur, e);
  }
}

inline double coef_a(int n, int k) {
  const double nn = static_cast<double>(n) * n;
  return std::sqrt((4.0 * nn - 1.0) / (nn - static_cast<double>(k) * k));
}

inline double coef_b(int n, int k) {
  const double m = static_cast<double>(n - 1);
  return std::sqrt((m * m - static_cast<double>(k) * k) / (4.0 * m * m - 1.0));
}

inline double coef_sector(int i) { return -std::sqrt((2.0 * i + 1.0) / (2.0 * i)); }

void column_untabled(int k, int n_top, double x, double s, std::span<double> out) {
  column_core(k, n_top, x, s, out, coef_sector, [k](int n) { return coef_a(n, k); },
              [k](int n) { return coef_b(n, k); });
}

}  // namespace

std::int64_t eigenvalue_sq(int n) {
  const auto m = static_cast<std::int64_t>(n);
  return m * m + m + 1;
}

int cluster_cutoff(int N) {
  if (N < 1) throw std::invalid_argument("cluster_cutoff: N must be >= 1");
  const auto cap = static_cast<std::int64_t>(N) * N;
  int n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(cap))));
  while (n > 0 && eigenvalue_sq(n) > cap) --n;
  while (eigenvalue_sq(n + 1) <= cap) ++n;
  return n;
}

EigenvalueTable::EigenvalueTable(int n_max) {
  if (n_max < 0) throw std::invalid_argument("EigenvalueTable: n_max must be >= 0");
  values_.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) values_[static_cast<std::size_t>(n)] = eigenvalue_sq(n);
}

LegendreRecurrence::LegendreRecurrence(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("LegendreRecurrence: n_max must be >= 0");
  const std::size_t size = slot(n_max + 1, 0);
  a_.assign(size, 0.0);
  b_.assign(size, 0.0);
  sector_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int k = 1; k <= n_max; ++k) sector_[static_cast<std::size_t>(k)] = coef_sector(k);
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k < n; ++k) {
      a_[slot(n, k)] = coef_a(n, k);
      b_[slot(n, k)] = coef_b(n, k);
    }
  }
}

void LegendreRecurrence::column(int k, int n_top, double x, double sin_theta,
                                std::span<double> out) const {
  if (k < 0 || n_top < k || n_top > n_max_) {
    throw std::out_of_range("LegendreRecurrence::column: bad degree range");
  }
  column_core(
      k, n_top, x, sin_theta, out, [this](int i) { return sector_[static_cast<std::size_t>(i)]; },
      [this, k](int n) { return a_[slot(n, k)]; }, [this, k](int n) { return b_[slot(n, k)]; });
}

double normalized_legendre(int n, int k, double x) {
  if (k < 0 || k > n) throw std::invalid_argument("normalized_legendre: require 0 <= k <= n");
  std::vector<double> col(static_cast<std::size_t>(n - k) + 1);
  column_untabled(k, n, x, std::sqrt(std::max(0.0, 1.0 - x * x)), col);
  return col.back();
}

double legendre_profile(const HarmonicIndex& idx, double theta) {
  const int k = std::abs(idx.k());
  std::vector<double> col(static_cast<std::size_t>(idx.n() - k) + 1);
  column_untabled(k, idx.n(), std::cos(theta), std::abs(std::sin(theta)), col);
  const double v = col.back();
  return (idx.k() < 0 && (k % 2 == 1)) ? -v : v;
}

cplx eval_harmonic(const HarmonicIndex& idx, double theta, double phi) {
  return std::polar(1.0, idx.k() * phi) * legendre_profile(idx, theta);
}

double legendre_polynomial(int n, double c) {
  if (n < 0) throw std::invalid_argument("legendre_polynomial: n must be >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = c;
  for (int m = 2; m <= n; ++m) {
    const double next = ((2.0 * m - 1.0) * c * cur - (m - 1.0) * prev) / m;
    prev = cur;
    cur = next;
  }
  return cur;
}

double projector_kernel(int n, double c) { return (2.0 * n + 1.0) * legendre_polynomial(n, c); }

OdeResidual legendre_ode_terms(const HarmonicIndex& idx, double theta, double pole_margin) {
  if (theta < pole_margin || theta > std::numbers::pi - pole_margin) {
    throw std::domain_error("legendre_ode_residual: colatitude too close to a pole");
  }
  const int n = idx.n();
  const int k = std::abs(idx.k());
  const double x = std::cos(theta);
  const double s = std::sin(theta);

  std::vector<double> col(static_cast<std::size_t>(n - k) + 1);
  column_untabled(k, n, x, s, col);
  auto v = [&](int m) { return m < k ? 0.0 : col[static_cast<std::size_t>(m - k)]; };
  // (sin d/dtheta) v_m = m x v_m - e_m v_{m-1}
  auto e = [k](int m) {
    if (m <= k) return 0.0;
    return std::sqrt((2.0 * m + 1.0) / (2.0 * m - 1.0) * static_cast<double>(m - k) * (m + k));
  };
  auto d1 = [&](int m) { return m < k ? 0.0 : m * x * v(m) - e(m) * v(m - 1); };

  const double vn = v(n);
  const double d2 = -n * s * s * vn + n * x * d1(n) - e(n) * d1(n - 1);

  const double t1 = -d2;
  const double t2 = static_cast<double>(k) * k * vn;
  const double t3 = -static_cast<double>(n) * (n + 1) * s * s * vn;
  OdeResidual r;
  r.absolute = std::abs(t1 + t2 + t3);
  r.scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return r;
}

}  // namespace picardlab::harmonics
