#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "picardlab/harmonics.hpp"

using namespace picardlab;
using namespace picardlab::harmonics;
using std::numbers::pi;

namespace {

// Independent route: libstdc++ special functions (no Condon-Shortley phase)
// times the factorial normalization constant.
double reference_profile(int n, int k, double theta) {
  const int a = std::abs(k);
  const double norm = std::sqrt((2.0 * n + 1.0) * std::tgamma(n - a + 1.0) / std::tgamma(n + a + 1.0));
  double v = ((a % 2) ? -1.0 : 1.0) * norm * std::assoc_legendre(n, a, std::cos(theta));
  if (k < 0 && (a % 2)) v = -v;
  return v;
}

struct Point {
  double theta, phi;
};

std::vector<Point> random_points(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) pts.push_back({std::acos(1.0 - 2.0 * u(rng)), 2.0 * pi * u(rng)});
  return pts;
}

}  // namespace

TEST_CASE("eigenvalues and cluster cutoff") {
  CHECK(eigenvalue_sq(0) == 1);
  CHECK(eigenvalue_sq(1) == 3);
  CHECK(eigenvalue_sq(3) == 13);
  CHECK(cluster_cutoff(1) == 0);
  CHECK(cluster_cutoff(2) == 1);
  CHECK(cluster_cutoff(10) == 9);

  for (int N = 1; N <= 600; ++N) {
    int brute = 0;
    while (eigenvalue_sq(brute + 1) <= static_cast<std::int64_t>(N) * N) ++brute;
    REQUIRE(cluster_cutoff(N) == brute);
  }
  EigenvalueTable table(50);
  for (int n = 1; n <= 50; ++n) CHECK(table[n] > table[n - 1]);
  CHECK_THROWS_AS(cluster_cutoff(0), std::invalid_argument);
}

TEST_CASE("harmonic index validation") {
  CHECK_THROWS_AS(HarmonicIndex(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(HarmonicIndex(-1, 0), std::invalid_argument);
  CHECK_NOTHROW(HarmonicIndex(2, -2));
}

TEST_CASE("eval_harmonic reference values") {
  const cplx y11 = eval_harmonic({1, 1}, pi / 2, 0.0);
  CHECK(y11.real() == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-14));
  CHECK(std::abs(y11.imag()) < 1e-15);

  CHECK(std::abs(eval_harmonic({1, 0}, 0.0, 0.3)) == doctest::Approx(std::sqrt(3.0)));
  CHECK(eval_harmonic({1, 0}, 0.0, 0.3).real() == doctest::Approx(std::sqrt(3.0)));

  for (int n = 1; n <= 20; ++n) {
    for (int k = -n; k <= n; ++k) {
      if ((n - k) % 2 != 0) CHECK(std::abs(eval_harmonic({n, k}, pi / 2, 0.7)) < 1e-13);
    }
  }
}

TEST_CASE("profiles agree with std::assoc_legendre for moderate degree") {
  for (int n = 0; n <= 30; ++n) {
    for (int k = -n; k <= n; ++k) {
      for (double theta : {0.1, 0.7, 1.3, 2.2, 3.0}) {
        const double ref = reference_profile(n, k, theta);
        const double got = legendre_profile({n, k}, theta);
        REQUIRE(got == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("unit norm by independent composite Simpson quadrature") {
  const int panels = 4000;
  for (auto [n, k] : {std::pair{1, 0}, {1, 1}, {4, 2}, {7, -5}, {12, 12}}) {
    double acc = 0.0;
    const double h = pi / panels;
    for (int i = 0; i <= panels; ++i) {
      const double th = i * h;
      const double f = std::pow(legendre_profile({n, k}, th), 2) * std::sin(th);
      const double wgt = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += wgt * f;
    }
    // (1/4pi) * 2pi * int v^2 sin = (1/2) int v^2 sin
    CHECK(0.5 * acc * h / 3.0 == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("high degree evaluation stays finite") {
  for (int n : {1024, 2048}) {
    for (int k : {0, 1, n / 2, n - 1, n}) {
      for (double theta : {1e-3, 0.05, 0.7, pi / 2, 2.9}) {
        const double v = legendre_profile({n, k}, theta);
        REQUIRE(std::isfinite(v));
        // Weyl bound: |v| <= sqrt(2n+1)
        REQUIRE(std::abs(v) <= std::sqrt(2.0 * n + 1.0) * (1 + 1e-9));
      }
    }
  }
  // Highest weight near the pole underflows to zero instead of overflowing.
  CHECK(legendre_profile({2048, 2048}, 1e-3) == 0.0);
}

TEST_CASE("local Weyl identity") {
  const auto pts = random_points(16, 11);
  for (int n = 0; n <= 64; ++n) {
    for (const auto& p : pts) {
      double s = 0.0;
      for (int k = -n; k <= n; ++k) s += std::norm(eval_harmonic({n, k}, p.theta, p.phi));
      REQUIRE(std::abs(s / (2.0 * n + 1.0) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("parity and conjugation symmetry") {
  for (int n = 0; n <= 25; ++n) {
    for (int k = -n; k <= n; ++k) {
      for (double theta : {0.2, 0.9, 1.4}) {
        const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
        const double lhs = legendre_profile({n, k}, pi - theta);
        const double rhs = sign * legendre_profile({n, k}, theta);
        REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
        const cplx a = eval_harmonic({n, -k}, theta, 0.4);
        const cplx b = ((k % 2) ? -1.0 : 1.0) * std::conj(eval_harmonic({n, k}, theta, 0.4));
        REQUIRE(std::abs(a - b) <= 1e-12);
      }
    }
  }
}

TEST_CASE("Legendre ODE residual") {
  for (double theta : {0.1, 0.8, 1.9, 3.0}) {
    CHECK(legendre_ode_residual({1, 0}, theta) < 1e-14);
  }
  CHECK(legendre_ode_residual({2, 1}, pi / 2) < 1e-13);
  for (int i = 0; i < 20; ++i) {
    const double theta = 0.05 + (pi - 0.1) * i / 19.0;
    CHECK(legendre_ode_terms({48, 30}, theta).relative() <= 1e-6);
  }
  CHECK(legendre_ode_terms({48, 30}, 1.0).relative() <= 1e-6);
  CHECK_THROWS_AS(legendre_ode_residual({3, 1}, 0.01), std::domain_error);
  CHECK_THROWS_AS(legendre_ode_residual({3, 1}, pi - 0.01), std::domain_error);
}

TEST_CASE("Legendre polynomials and projector kernel") {
  CHECK(legendre_polynomial(0, 0.37) == 1.0);
  CHECK(legendre_polynomial(1, 0.3) == doctest::Approx(0.3));
  CHECK(legendre_polynomial(2, 0.5) == doctest::Approx(-0.125));
  for (int n = 0; n <= 40; ++n) CHECK(projector_kernel(n, 1.0) == doctest::Approx(2.0 * n + 1.0));
  CHECK(projector_kernel(0, -0.3) == 1.0);

  const auto pts = random_points(10, 5);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const auto& x = pts[i];
    const auto& y = pts[i + 1];
    const double c = std::cos(x.theta) * std::cos(y.theta) +
                     std::sin(x.theta) * std::sin(y.theta) * std::cos(x.phi - y.phi);
    cplx direct{};
    for (int k = -5; k <= 5; ++k) {
      direct += eval_harmonic({5, k}, x.theta, x.phi) * std::conj(eval_harmonic({5, k}, y.theta, y.phi));
    }
    CHECK(std::abs(direct.imag()) < 1e-12);
    CHECK(direct.real() == doctest::Approx(projector_kernel(5, c)).epsilon(1e-10).scale(1.0));
  }
}
