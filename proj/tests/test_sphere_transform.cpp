#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "picardlab/quadrature.hpp"
#include "picardlab/sphere_transform.hpp"

using namespace picardlab;
using namespace picardlab::sphere;

namespace {

SpectralField random_field(int n_max, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  SpectralField f(n_max);
  for (auto& c : f.coeffs()) c = {g(rng), g(rng)};
  return f;
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
  return std::sqrt((a - b).norm_sq() / std::max(1e-300, b.norm_sq()));
}

GridValues pointwise(const GridValues& a, const GridValues& b, bool conj_b = false) {
  GridValues out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * (conj_b ? std::conj(b[i]) : b[i]);
  return out;
}

}  // namespace

TEST_CASE("Gauss-Legendre rule") {
  for (int count : {1, 2, 5, 40, 301}) {
    auto rule = gauss_legendre(count);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
    // exact for x^(2count-2)
    double m = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) m += rule.weights[i] * std::pow(rule.nodes[i], 2 * count - 2);
    CHECK(m == doctest::Approx(2.0 / (2 * count - 1)).epsilon(1e-12));
  }
}

TEST_CASE("grid sizing and normalization") {
  for (int n : {0, 1, 7, 48}) {
    SphereGrid g(n);
    CHECK(g.theta_count() == 2 * n + 2);
    CHECK(g.phi_count() >= 4 * n + 2);
    CHECK(g.phi_count() % 2 == 0);
    double s = 0.0;
    for (int j = 0; j < g.theta_count(); ++j) s += g.cell_weight(j) * g.phi_count();
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  CHECK(smooth_phi_count(4 * 7 + 2) == 30);
  CHECK(smooth_phi_count(4 * 12 + 2) == 50);
  CHECK(smooth_phi_count(4 * 13 + 2) == 54);
}

TEST_CASE("quadrature exactness") {
  SphereGrid g(6);
  GridValues c2(g.size());
  for (int j = 0; j < g.theta_count(); ++j)
    for (int l = 0; l < g.phi_count(); ++l)
      c2[static_cast<std::size_t>(j * g.phi_count() + l)] = std::pow(g.cos_theta()[static_cast<std::size_t>(j)], 2);
  CHECK(integrate(c2, g).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // |Y_{3,2}|^2 |Y_{5,1}|^2 at base resolution and doubled resolution
  auto quartic = [](const SphereGrid& grid) {
    SpectralField a(5), b(5);
    a(3, 2) = 1.0;
    b(5, 1) = 1.0;
    auto va = synthesize(a, grid);
    auto vb = synthesize(b, grid);
    GridValues prod(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) prod[i] = std::norm(va[i]) * std::norm(vb[i]);
    return integrate(prod, grid).real();
  };
  const double base = quartic(SphereGrid(5));
  const double fine = quartic(SphereGrid(10));
  CHECK(base == doctest::Approx(fine).epsilon(1e-10));
}

TEST_CASE("synthesize matches pointwise evaluation") {
  std::mt19937_64 rng(3);
  SpectralField f = random_field(6, rng);
  SphereGrid g(6);
  auto vals = synthesize(f, g);
  for (int j : {0, 3, 9}) {
    for (int l : {0, 5, 17}) {
      cplx direct{};
      for (int n = 0; n <= 6; ++n)
        for (int k = -n; k <= n; ++k)
          direct += f(n, k) * harmonics::eval_harmonic({n, k}, g.theta()[static_cast<std::size_t>(j)], g.phi(l));
      CHECK(std::abs(direct - vals[static_cast<std::size_t>(j * g.phi_count() + l)]) < 1e-11);
    }
  }
}

TEST_CASE("analysis examples") {
  SphereGrid g(4);
  SpectralField single(4);
  single(2, 1) = 1.0;
  CHECK(rel_diff(analyze(synthesize(single, g), g, 4), single) < 1e-10);

  GridValues ones(g.size(), cplx{1.0});
  auto c = analyze(ones, g, 4);
  CHECK(std::abs(c(0, 0) - 1.0) < 1e-13);
  CHECK(c.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));

  SpectralField y11(1);
  y11(1, 1) = 1.0;
  auto v = synthesize(y11, g);
  auto prod = analyze(pointwise(v, v, true), g, 2, 2);
  CHECK(std::abs(prod(0, 0) - 1.0) < 1e-13);
}

TEST_CASE("band limit violations are rejected") {
  SphereGrid g(3);
  GridValues vals(g.size());
  CHECK_THROWS_AS(analyze(vals, g, 13), BandLimitError);
  CHECK_THROWS_AS(analyze(vals, g, 7, 6), BandLimitError);
  CHECK_NOTHROW(analyze(vals, g, 6, 6));
  CHECK_THROWS_AS(synthesize(SpectralField(40), g), BandLimitError);
}

TEST_CASE("Gram matrix under grid quadrature is the identity") {
  const int n_max = 8;
  SphereGrid g(n_max);
  std::vector<GridValues> basis;
  for (int n = 0; n <= n_max; ++n)
    for (int k = -n; k <= n; ++k) {
      SpectralField f(n_max);
      f(n, k) = 1.0;
      basis.push_back(synthesize(f, g));
    }
  double worst = 0.0;
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = a; b < basis.size(); ++b) {
      const cplx ip = integrate(pointwise(basis[a], basis[b], true), g);
      worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
    }
  CHECK(worst <= 1e-9);
}

TEST_CASE("round trip, Parseval and product invariance on random fields") {
  std::mt19937_64 rng(7);
  const int n_max = 24;
  auto grid = SphereGrid::shared(n_max);
  auto fine = SphereGrid::shared(2 * n_max);
  for (int trial = 0; trial < 3; ++trial) {
    SpectralField f = random_field(n_max, rng);
    auto v = synthesize(f, *grid);
    CHECK(rel_diff(analyze(v, *grid, n_max), f) <= 1e-9);
    GridValues sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = std::norm(v[i]);
    CHECK(integrate(sq, *grid).real() == doctest::Approx(f.norm_sq()).epsilon(1e-9));

    SpectralField h = random_field(n_max / 2, rng);
    auto prod_base = analyze(pointwise(v, synthesize(h, *grid)), *grid, n_max + n_max / 2, n_max + n_max / 2);
    auto prod_fine = analyze(pointwise(synthesize(f, *fine), synthesize(h, *fine)), *fine, n_max + n_max / 2);
    CHECK(rel_diff(prod_base, prod_fine) <= 1e-9);
  }
}

TEST_CASE("Sobolev norms, projections and truncation") {
  SpectralField f(3);
  f(2, -1) = 1.0;
  CHECK(sobolev_norm(f, 0.7) == doctest::Approx(std::pow(7.0, 0.35)));
  SpectralField two(2);
  two(1, 0) = 1.0;
  two(2, 2) = 1.0;
  CHECK(sobolev_norm(two, 1.0) == doctest::Approx(std::sqrt(10.0)));

  std::mt19937_64 rng(1);
  SpectralField r = random_field(9, rng);
  CHECK(sobolev_norm(r, 0.0) == doctest::Approx(std::sqrt(r.norm_sq())));
  double parts = 0.0;
  for (int n = 0; n <= 9; ++n) parts += project_cluster(r, n).norm_sq();
  CHECK(parts == doctest::Approx(r.norm_sq()));
  CHECK(project_cluster(project_cluster(r, 4), 4) == project_cluster(r, 4));
  CHECK(project_cluster(project_cluster(r, 4), 5).norm_sq() == 0.0);
  CHECK(truncate(truncate(r, 6), 6) == truncate(r, 6));
  auto t2 = truncate(r, 2);
  CHECK(t2.cluster_norm_sq(1) > 0.0);
  CHECK(t2.cluster_norm_sq(2) == 0.0);
  // linearity
  SpectralField s = random_field(9, rng);
  CHECK(rel_diff(project_cluster(r + s, 3), project_cluster(r, 3) + project_cluster(s, 3)) < 1e-15);
}
