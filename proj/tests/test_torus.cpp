#include <doctest.h>

#include <cmath>

#include "picardlab/random_field.hpp"
#include "picardlab/torus.hpp"

using namespace picardlab;
using namespace picardlab::torus;

namespace {

const double kBeta = std::pow(2.0, 0.25);

// Direct enumeration over the box, no tables, no level bookkeeping.
double brute_force_sum(double beta, double s, double t, int N, bool surrogate) {
  std::vector<TorusMode> ball;
  for (int k = -N - 1; k <= N + 1; ++k)
    for (int m = -N - 2; m <= N + 2; ++m)
      if (k * k + beta * beta * m * m <= N * N + 1e-9) ball.push_back({k, m});
  auto bracket_sq = [&](TorusMode n) { return 1.0 + n.k * n.k + beta * beta * n.m * n.m; };
  double total = 0.0;
  for (auto a : ball)
    for (auto b : ball)
      for (auto c : ball) {
        if (b == a || b == c) continue;
        const TorusMode d1 = a - b, d2 = b - c;
        const double phi = 2.0 * (d1.k * d2.k + beta * beta * d1.m * d2.m);
        double w;
        if (surrogate) {
          w = 1.0 / (1.0 + phi * phi);
        } else {
          w = phi == 0.0 ? t * t : std::pow(std::abs((1.0 - std::polar(1.0, t * phi)) / phi), 2);
        }
        total += std::pow(bracket_sq(a - b + c), s) * w / (bracket_sq(a) * bracket_sq(b) * bracket_sq(c));
      }
  return total;
}

}  // namespace

TEST_CASE("quadratic form") {
  for (double b : {0.3, 1.0, kBeta}) CHECK(q_form(b, {1, 0}, {1, 0}) == 1.0);
  CHECK(q_form(kBeta, {1, 1}) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
  CHECK(q_form(kBeta, {3, -2}, {5, 7}) == q_form(kBeta, {5, 7}, {3, -2}));
}

TEST_CASE("resonance function") {
  CHECK(phi_resonance(kBeta, {2, 1}, {2, 1}, {5, -3}) == 0.0);
  CHECK(phi_resonance(kBeta, {2, 2}, {1, 1}, {0, 0}) == doctest::Approx(2.0 * (1.0 + std::sqrt(2.0))));
  std::uint64_t idx = 0;
  for (int i = 0; i < 500; ++i) {
    TorusMode n[3];
    for (auto& v : n) {
      const auto u = uniform_pair(5, Stream::synthetic, 0, 0, idx++);
      v = {static_cast<int>(u[0] * 61) - 30, static_cast<int>(u[1] * 61) - 30};
    }
    const double phi = phi_resonance(kBeta, n[0], n[1], n[2]);
    const double direct = q_form(kBeta, n[0]) - q_form(kBeta, n[1]) + q_form(kBeta, n[2]) -
                          q_form(kBeta, n[0] - n[1] + n[2]);
    CHECK(std::abs(phi - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    CHECK(phi_resonance(kBeta, n[2], n[1], n[0]) == doctest::Approx(phi));
  }
}

TEST_CASE("mode ball") {
  const auto m = modes(kBeta, 1);
  CHECK(m.size() == 3);
  for (auto n : modes(kBeta, 7)) CHECK(q_form(kBeta, n) <= 49.0 + 1e-9);
  CHECK(modes(1.0, 5).size() == 81);
}

TEST_CASE("iterate sum against brute force") {
  for (int N : {1, 2, 3})
    for (double s : {0.0, 0.45}) {
      TorusConfig c;
      c.s = s;
      c.t = 0.7;
      c.N = N;
      CHECK(expected_iterate_sq_torus(c, KernelMode::exact_time) ==
            doctest::Approx(brute_force_sum(kBeta, s, 0.7, N, false)).epsilon(1e-12));
      CHECK(expected_iterate_sq_torus(c, KernelMode::surrogate) ==
            doctest::Approx(brute_force_sum(kBeta, s, 0.7, N, true)).epsilon(1e-12));
    }
}

TEST_CASE("series, monotonicity, exclusion and kernels") {
  TorusConfig c;
  c.s = 0.45;
  const std::vector<int> Ns{1, 2, 3, 4, 5, 6};
  const auto sur = expected_iterate_sq_torus_series(c, Ns, KernelMode::surrogate);
  const auto ex = expected_iterate_sq_torus_series(c, Ns, KernelMode::exact_time);
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    c.N = Ns[i];
    CHECK(sur[i] == doctest::Approx(expected_iterate_sq_torus(c, KernelMode::surrogate)).epsilon(1e-12));
    if (i > 0) CHECK(sur[i] >= sur[i - 1]);
    // |chi|^2 <= min(t^2, 4/Phi^2) <= max(1, 2 t^2) * 4 / (1 + Phi^2)
    CHECK(ex[i] <= std::max(1.0, 2.0 * c.t * c.t) * 4.0 * sur[i]);
  }
  TorusOptions loose;
  loose.include_paired = true;
  c.N = 4;
  CHECK(expected_iterate_sq_torus(c, KernelMode::surrogate, loose) > expected_iterate_sq_torus(c, KernelMode::surrogate));
  TorusOptions threads;
  threads.threads = 3;
  CHECK(expected_iterate_sq_torus(c, KernelMode::exact_time, threads) == expected_iterate_sq_torus(c, KernelMode::exact_time));
  c.N = 17;
  CHECK_THROWS_AS(expected_iterate_sq_torus(c, KernelMode::surrogate), std::invalid_argument);
}

TEST_CASE("exact kernel") {
  CHECK(exact_kernel(0.3, 0.0) == doctest::Approx(0.09));
  for (double phi : {0.5, 3.0, 40.0}) {
    CHECK(exact_kernel(0.3, phi) <= std::min(0.09, 4.0 / (phi * phi)) + 1e-15);
    CHECK(exact_kernel(0.3, phi) == doctest::Approx(std::norm((1.0 - std::polar(1.0, 0.3 * phi)) / phi)));
  }
}

TEST_CASE("lattice counting") {
  for (double beta : {0.7, kBeta, 3.0})
    for (int N1 : {4, 16, 64}) CHECK(lattice_count(N1, {1, 0}, 0, 0.2, beta) == 2 * N1);
  // irrational beta^2 off the axes never hits an integer exactly
  CHECK(lattice_count(32, {1, 1}, 1, 0.0, kBeta) == 0);
  CHECK_THROWS_AS(lattice_count(8, {1, 0}, 0, 0.25, kBeta), std::invalid_argument);

  for (int N1 : {8, 16}) {
    const auto prof = lattice_profile(N1, {2, 3}, 0.2, kBeta);
    for (const auto& [l, cnt] : prof) CHECK(lattice_count(N1, {2, 3}, l, 0.2, kBeta) == cnt);
    CHECK(lattice_count(N1, {2, 3}, 100000, 0.2, kBeta) == 0);
  }
  for (int N1 : {64, 128, 256}) {
    std::int64_t worst = 0;
    for (const auto& [l, cnt] : lattice_profile(N1, {1, 1}, 0.2, kBeta)) worst = std::max(worst, cnt);
    CHECK(static_cast<double>(worst) / N1 <= 8.0);
  }
}

TEST_CASE("case 2 gap") {
  const double b2 = kBeta * kBeta;
  for (int N2 : {32, 64}) {
    const auto g = case2_gap_scan(kBeta, N2, 2000, 3, 0);
    CHECK(g.min_ratio >= 2.0 * std::min(1.0, b2));
    CHECK(g.max_ratio < 8.0 * std::max(1.0, b2));
    const auto g1 = case2_gap_scan(1.0, N2, 2000, 3, 0);
    CHECK(g1.min_ratio >= 2.0);
    CHECK(g1.max_ratio < 8.0);
  }
  const auto a = case2_gap_scan(kBeta, 64, 4000, 9, 4);
  const auto b = case2_gap_scan(kBeta, 128, 4000, 9, 8);
  CHECK(a.min_ratio > 0.0);
  CHECK(b.min_ratio > 0.0);
  CHECK(b.min_ratio == doctest::Approx(a.min_ratio).epsilon(0.5));
  CHECK_THROWS_AS(case2_gap_scan(kBeta, 32, 10, 1, 4), std::invalid_argument);
}
