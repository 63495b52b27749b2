#include <doctest.h>

#include <cmath>
#include <numbers>

#include "picardlab/random_field.hpp"

using namespace picardlab;
using namespace picardlab::random_field;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  auto a = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(a == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto b = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu});
  CHECK(b == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto c = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u});
  CHECK(c == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draws are keyed, not sequenced") {
  const auto s1 = GaussianSample::draw(42, 7, 1.0, 6);
  const auto s2 = GaussianSample::draw(42, 7, 1.0, 6);
  CHECK(s1.g == s2.g);
  // Smaller cutoff reproduces the same prefix.
  const auto s3 = GaussianSample::draw(42, 7, 1.0, 3);
  for (int n = 0; n <= 3; ++n)
    for (int k = -n; k <= n; ++k) CHECK(s3.g(n, k) == s1.g(n, k));
  CHECK(complex_gaussian(42, 7, 5, -2) == s1.g(5, -2));
  CHECK(complex_gaussian(43, 7, 5, -2) != s1.g(5, -2));
  CHECK(complex_gaussian(42, 8, 5, -2) != s1.g(5, -2));
  const auto c = sample_cluster(42, 7, 4);
  const auto d = cluster_of(s1, 4);
  CHECK(c.field == d.field);
}

TEST_CASE("complex Gaussian moments") {
  const int count = 20000;
  std::vector<double> re, im, mod2, sq_re;
  for (int i = 0; i < count; ++i) {
    const cplx g = complex_gaussian(9, static_cast<std::uint64_t>(i), 3, 1);
    re.push_back(g.real());
    im.push_back(g.imag());
    mod2.push_back(std::norm(g));
    sq_re.push_back((g * g).real());
  }
  CHECK(estimate(re).within(0.0, 4.0));
  CHECK(estimate(im).within(0.0, 4.0));
  CHECK(estimate(mod2).within(1.0, 4.0));
  CHECK(estimate(sq_re).within(0.0, 4.0));
}

TEST_CASE("cluster Gaussian normalization") {
  const int count = 4000;
  for (int n : {0, 2, 7}) {
    std::vector<double> norms, mean_re, var;
    const SpherePoint x{1.1, 2.0};
    for (int i = 0; i < count; ++i) {
      const auto e = sample_cluster(3, static_cast<std::uint64_t>(i), n);
      norms.push_back(e.field.norm_sq());
      const cplx v = eval_cluster(e, x);
      mean_re.push_back(v.real());
      var.push_back(std::norm(v));
    }
    CHECK(estimate(norms).within(1.0, 4.0));
    CHECK(estimate(mean_re).within(0.0, 4.0));
    CHECK(estimate(var).within(1.0, 4.0));
  }
}

TEST_CASE("truncated random data") {
  CHECK(expected_phi_sobolev_sq(2.0, 2, 0.0) == doctest::Approx(4.0 / 3.0));
  std::vector<double> vals;
  for (int i = 0; i < 20000; ++i) vals.push_back(sphere::sobolev_norm(sample_phi(5, static_cast<std::uint64_t>(i), 2.0, 2), 0.0) *
                                                sphere::sobolev_norm(sample_phi(5, static_cast<std::uint64_t>(i), 2.0, 2), 0.0));
  CHECK(estimate(vals).within(4.0 / 3.0, 4.0));

  // H^{alpha-1} mass grows like 2 ln N: doubling increments approach 2 ln 2.
  double prev_inc = 0.0;
  for (int N : {256, 512, 1024, 2048}) {
    const double inc = expected_phi_sobolev_sq(1.3, 2 * N, 0.3) - expected_phi_sobolev_sq(1.3, N, 0.3);
    CHECK(inc == doctest::Approx(2.0 * std::log(2.0)).epsilon(0.01));
    if (prev_inc > 0.0) CHECK(inc > 0.0);
    prev_inc = inc;
  }

  // Large alpha pushes all mass onto the constant cluster.
  const auto phi = sample_phi(5, 1, 40.0, 10);
  CHECK(phi.norm_sq() - phi.cluster_norm_sq(0) < 1e-15);
}

TEST_CASE("linear flow") {
  const auto f = sample_phi(1, 2, 1.0, 6);
  CHECK(linear_flow(f, 0.0) == f);
  const auto g = linear_flow(f, 0.37);
  for (double s : {-1.0, 0.0, 0.5, 2.0})
    CHECK(sphere::sobolev_norm(g, s) == doctest::Approx(sphere::sobolev_norm(f, s)).epsilon(1e-12));
  const auto h = linear_flow(f, std::numbers::pi / 3.0);
  for (int k = -1; k <= 1; ++k) CHECK(std::abs(h(1, k) + f(1, k)) < 1e-14);
}

TEST_CASE("moment suite small sample") {
  for (int n : {1, 4}) {
    const auto r = moment_suite(17, n, {2.0, 4.0, 6.0}, 3000);
    CHECK(r.variance.within(1.0, 4.0));
    CHECK(r.point_third_re.within(0.0, 4.0));
    CHECK(r.point_third_im.within(0.0, 4.0));
    CHECK(r.mass_third_re.within(0.0, 4.0));
    CHECK(r.mass_third_im.within(0.0, 4.0));
    // p=2: ||e_n||_{L^2_omega L^2_x} = 1 exactly in expectation
    CHECK(r.lp[0].scaled.within(1.0 / std::sqrt(2.0), 4.0));
    for (const auto& m : r.lp) CHECK(m.scaled.mean <= 3.0);
  }
  CHECK_THROWS_AS(moment_suite(1, 2, {2.0}, 50), std::invalid_argument);
}

TEST_CASE("independence across clusters") {
  const int count = 6000;
  const SpherePoint x{0.4, 1.0};
  std::vector<double> prod;
  for (int i = 0; i < count; ++i) {
    const double a = std::norm(eval_cluster(sample_cluster(8, static_cast<std::uint64_t>(i), 3), x)) - 1.0;
    const double b = std::norm(eval_cluster(sample_cluster(8, static_cast<std::uint64_t>(i), 4), x)) - 1.0;
    prod.push_back(a * b);
  }
  CHECK(estimate(prod).within(0.0, 4.0));
}

namespace {

// Random unitary by modified Gram-Schmidt on a complex Gaussian matrix.
std::vector<std::vector<cplx>> random_unitary(int dim, std::uint64_t seed) {
  std::vector<std::vector<cplx>> q(static_cast<std::size_t>(dim), std::vector<cplx>(static_cast<std::size_t>(dim)));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const auto [a, b] = normal_pair(seed, Stream::rotation, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0);
      q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = {a, b};
    }
  for (int i = 0; i < dim; ++i) {
    auto& v = q[static_cast<std::size_t>(i)];
    for (int p = 0; p < i; ++p) {
      const auto& u = q[static_cast<std::size_t>(p)];
      cplx ip{};
      for (int j = 0; j < dim; ++j) ip += std::conj(u[static_cast<std::size_t>(j)]) * v[static_cast<std::size_t>(j)];
      for (int j = 0; j < dim; ++j) v[static_cast<std::size_t>(j)] -= ip * u[static_cast<std::size_t>(j)];
    }
    double nn = 0.0;
    for (const cplx& z : v) nn += std::norm(z);
    for (cplx& z : v) z /= std::sqrt(nn);
  }
  return q;
}

double l4_norm(const SpectralField& f, const SphereGrid& grid) {
  const auto v = sphere::synthesize(f, grid);
  sphere::GridValues q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = std::pow(std::norm(v[i]), 2);
  return std::pow(sphere::integrate(q, grid).real(), 0.25);
}

}  // namespace

TEST_CASE("L4 law of e_n is invariant under a unitary change of cluster coefficients") {
  const int n = 6;
  const int dim = 2 * n + 1;
  const auto U = random_unitary(dim, 77);
  auto grid = SphereGrid::for_degree(4 * n);
  const int count = 3000;
  std::vector<double> plain, rotated;
  for (int i = 0; i < count; ++i) {
    const auto e = sample_cluster(31, static_cast<std::uint64_t>(i), n);
    SpectralField r(n);
    for (int a = 0; a < dim; ++a) {
      cplx acc{};
      for (int b = 0; b < dim; ++b) acc += U[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * e.field(n, b - n);
      r(n, a - n) = acc;
    }
    plain.push_back(l4_norm(e.field, *grid));
    // independent draws for the rotated arm so the two estimates are independent
    const auto e2 = sample_cluster(32, static_cast<std::uint64_t>(i), n);
    SpectralField r2(n);
    for (int a = 0; a < dim; ++a) {
      cplx acc{};
      for (int b = 0; b < dim; ++b) acc += U[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * e2.field(n, b - n);
      r2(n, a - n) = acc;
    }
    rotated.push_back(l4_norm(r2, *grid));
    CHECK(r.norm_sq() == doctest::Approx(e.field.norm_sq()).epsilon(1e-12));
  }
  const auto a = estimate(plain);
  const auto b = estimate(rotated);
  CHECK(std::abs(a.mean - b.mean) <= 4.0 * std::hypot(a.std_error, b.std_error));
}
