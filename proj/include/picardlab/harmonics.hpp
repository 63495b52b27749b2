#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace picardlab {

using cplx = std::complex<double>;

/// Degree/order pair of a spherical harmonic. Construction enforces |k| <= n.
class HarmonicIndex {
 public:
  HarmonicIndex(int n, int k) : n_(n), k_(k) {
    if (n < 0 || k < -n || k > n) {
      throw std::invalid_argument("HarmonicIndex: require |k| <= n, got n=" + std::to_string(n) +
                                  " k=" + std::to_string(k));
    }
  }
  int n() const { return n_; }
  int k() const { return k_; }

 private:
  int n_;
  int k_;
};

namespace harmonics {

/// lambda_n^2 = n^2 + n + 1, the eigenvalues of -Laplacian + 1.
std::int64_t eigenvalue_sq(int n);
inline double eigenvalue(int n) { return std::sqrt(static_cast<double>(eigenvalue_sq(n))); }

/// Largest degree n with lambda_n <= N.
int cluster_cutoff(int N);

/// Exact table of lambda_n^2 for 0 <= n <= n_max.
class EigenvalueTable {
 public:
  explicit EigenvalueTable(int n_max);
  int n_max() const { return static_cast<int>(values_.size()) - 1; }
  std::int64_t operator[](int n) const { return values_[static_cast<std::size_t>(n)]; }

 private:
  std::vector<std::int64_t> values_;
};

/// Recurrence coefficients for the unit-normalized associated Legendre functions
///   v_{n,k}(theta) = c_{n,k} L_{n,k}(cos theta),  (1/2) int_{-1}^{1} v_{n,k}^2 dc = 1,
/// Condon-Shortley phase included. Tables are immutable after construction.
class LegendreRecurrence {
 public:
  explicit LegendreRecurrence(int n_max);

  int n_max() const { return n_max_; }

  /// Writes v_{n,k}(x) for n = k..n_top into out[0..n_top-k], k >= 0, n_top <= n_max.
  /// sin_theta = sqrt(1-x^2) is passed in so callers on grids can reuse it.
  /// Intermediate values carry a separate binary exponent, so high-order columns
  /// underflow gracefully instead of poisoning the recurrence.
  void column(int k, int n_top, double x, double sin_theta, std::span<double> out) const;

 private:
  std::size_t slot(int n, int k) const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2 +
           static_cast<std::size_t>(k);
  }

  int n_max_;
  std::vector<double> a_;       // sqrt((4n^2-1)/(n^2-k^2))
  std::vector<double> b_;       // sqrt(((n-1)^2-k^2)/(4(n-1)^2-1))
  std::vector<double> sector_;  // -sqrt((2k+1)/(2k))
};

/// Single-column evaluation without tables; cost O(n).
double normalized_legendre(int n, int k, double x);

/// v_{n,k}(theta) for any integer k with |k| <= n, using v_{n,-k} = (-1)^k v_{n,k}.
double legendre_profile(const HarmonicIndex& idx, double theta);

/// Y_{n,k}(theta, phi) = e^{ik phi} v_{n,k}(theta), unit L2 norm under the
/// probability measure (4 pi)^{-1} sin(theta) dtheta dphi.
cplx eval_harmonic(const HarmonicIndex& idx, double theta, double phi);

/// Legendre polynomial P_n(c) by the three-term recurrence.
double legendre_polynomial(int n, double c);

/// Kernel of the orthogonal projector onto degree-n harmonics: (2n+1) P_n(c).
double projector_kernel(int n, double c);

struct OdeResidual {
  double absolute = 0.0;
  double scale = 0.0;  // max of the three summand magnitudes
  double relative() const { return scale > 0.0 ? absolute / scale : 0.0; }
};

inline constexpr double kPoleMargin = 0.05;

/// Residual of -(sin d/dtheta)^2 v + (k^2 - n(n+1) sin^2) v = 0, with derivatives
/// taken from the analytic Legendre derivative relations.
/// Throws std::domain_error if theta lies within `pole_margin` of a pole.
OdeResidual legendre_ode_terms(const HarmonicIndex& idx, double theta,
                               double pole_margin = kPoleMargin);

inline double legendre_ode_residual(const HarmonicIndex& idx, double theta,
                                    double pole_margin = kPoleMargin) {
  return legendre_ode_terms(idx, theta, pole_margin).absolute;
}

}  // namespace harmonics
}  // namespace picardlab
