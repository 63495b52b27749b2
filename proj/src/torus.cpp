#include "picardlab/torus.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "picardlab/parallel.hpp"
#include "picardlab/random_field.hpp"

namespace picardlab::torus {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("torus: beta must be positive");
}

bool in_ball(double beta, TorusMode n, int N) {
  return q_form(beta, n) <= static_cast<double>(N) * N * (1.0 + 1e-12);
}

// <n>^{2s} on a box of frequencies, indexed by offset.
class BracketTable {
 public:
  BracketTable(double beta, double s, int K, int M) : K_(K), M_(M), w_(static_cast<std::size_t>((2 * K + 1) * (2 * M + 1))) {
    for (int k = -K; k <= K; ++k)
      for (int m = -M; m <= M; ++m) w_[slot(k, m)] = std::pow(1.0 + q_form(beta, {k, m}), s);
  }
  double operator()(TorusMode n) const { return w_[slot(n.k, n.m)]; }

 private:
  int K_, M_;
  std::vector<double> w_;
  std::size_t slot(int k, int m) const {
    return static_cast<std::size_t>((k + K_) * (2 * M_ + 1) + (m + M_));
  }
};

}  // namespace

std::vector<TorusMode> modes(double beta, int N) {
  check_beta(beta);
  if (N < 0) throw std::invalid_argument("torus::modes: N must be >= 0");
  const int M = static_cast<int>(std::floor(N / beta)) + 1;
  std::vector<TorusMode> out;
  for (int k = -N; k <= N; ++k)
    for (int m = -M; m <= M; ++m)
      if (in_ball(beta, {k, m}, N)) out.push_back({k, m});
  return out;
}

double exact_kernel(double t, double phi) {
  if (std::abs(phi) < 1e-12) return t * t;
  const double h = std::sin(0.5 * t * phi);
  return 4.0 * h * h / (phi * phi);
}

std::vector<double> expected_iterate_sq_torus_series(const TorusConfig& config, const std::vector<int>& N_list,
                                                     KernelMode mode, const TorusOptions& options) {
  check_beta(config.beta);
  if (N_list.empty()) return {};
  if (!std::is_sorted(N_list.begin(), N_list.end())) throw std::invalid_argument("torus: N_list must be ascending");
  const int top = N_list.back();
  if (top > options.desk_bound) {
    throw std::invalid_argument("torus: N = " + std::to_string(top) + " above the desk bound " +
                                std::to_string(options.desk_bound));
  }
  if (N_list.front() < 0) throw std::invalid_argument("torus: N must be >= 0");
  const double beta = config.beta;
  const auto all = modes(beta, top);
  const std::size_t P = all.size();

  // smallest list position whose ball contains the mode
  std::vector<int> level(P);
  std::vector<double> inv(P);
  for (std::size_t i = 0; i < P; ++i) {
    int pos = 0;
    while (!in_ball(beta, all[i], N_list[static_cast<std::size_t>(pos)])) ++pos;
    level[i] = pos;
    inv[i] = 1.0 / (1.0 + q_form(beta, all[i]));
  }
  const int K = 3 * top;
  const int M = 3 * (static_cast<int>(std::floor(top / beta)) + 1);
  const BracketTable bracket(beta, config.s, K, M);
  const std::size_t L = N_list.size();

  std::vector<std::vector<double>> slots(P, std::vector<double>(L, 0.0));
  parallel_for(P, options.threads, [&](std::size_t i1) {
    auto& acc = slots[i1];
    const TorusMode n1 = all[i1];
    std::vector<double> part(L);
    for (std::size_t i3 = 0; i3 < P; ++i3) {
      const TorusMode n3 = all[i3];
      const int lv13 = std::max(level[i1], level[i3]);
      const double w13 = inv[i1] * inv[i3];
      std::fill(part.begin(), part.end(), 0.0);
      for (std::size_t i2 = 0; i2 < P; ++i2) {
        if (!options.include_paired && (i2 == i1 || i2 == i3)) continue;
        const TorusMode n2 = all[i2];
        const double phi = phi_resonance(beta, n1, n2, n3);
        const double w = mode == KernelMode::exact_time ? exact_kernel(config.t, phi) : 1.0 / (1.0 + phi * phi);
        part[static_cast<std::size_t>(std::max(lv13, level[i2]))] += bracket(n1 - n2 + n3) * w * inv[i2];
      }
      for (std::size_t j = 0; j < L; ++j) acc[j] += w13 * part[j];
    }
  });
  std::vector<double> out(L, 0.0);
  for (const auto& s : slots)
    for (std::size_t j = 0; j < L; ++j) out[j] += s[j];
  for (std::size_t j = 1; j < L; ++j) out[j] += out[j - 1];
  return out;
}

double expected_iterate_sq_torus(const TorusConfig& config, KernelMode mode, const TorusOptions& options) {
  return expected_iterate_sq_torus_series(config, {config.N}, mode, options).front();
}

namespace {

template <class Visit>
void shell_values(int N1, TorusMode m0, double beta, Visit&& visit) {
  const std::int64_t lo = static_cast<std::int64_t>(N1) * N1;
  const std::int64_t hi = 4 * lo;
  for (int k = -2 * N1; k <= 2 * N1; ++k)
    for (int m = -2 * N1; m <= 2 * N1; ++m) {
      const std::int64_t r = static_cast<std::int64_t>(k) * k + static_cast<std::int64_t>(m) * m;
      if (r < lo || r >= hi) continue;
      visit(q_form(beta, {k, m}, m0));
    }
}

void check_count_args(int N1, double delta, double beta) {
  check_beta(beta);
  if (N1 < 1) throw std::invalid_argument("lattice_count: N1 must be >= 1");
  if (!(delta >= 0.0 && delta < 0.25)) throw std::invalid_argument("lattice_count: delta must lie in [0, 1/4)");
}

}  // namespace

std::int64_t lattice_count(int N1, TorusMode m0, std::int64_t l, double delta, double beta) {
  check_count_args(N1, delta, beta);
  std::int64_t count = 0;
  shell_values(N1, m0, beta, [&](double q) {
    if (std::abs(q - static_cast<double>(l)) <= delta) ++count;
  });
  return count;
}

std::vector<std::pair<std::int64_t, std::int64_t>> lattice_profile(int N1, TorusMode m0, double delta, double beta) {
  check_count_args(N1, delta, beta);
  std::vector<std::int64_t> hits;
  shell_values(N1, m0, beta, [&](double q) {
    const double l = std::round(q);
    if (std::abs(q - l) <= delta) hits.push_back(static_cast<std::int64_t>(l));
  });
  std::sort(hits.begin(), hits.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t l : hits) {
    if (!out.empty() && out.back().first == l) {
      ++out.back().second;
    } else {
      out.push_back({l, 1});
    }
  }
  return out;
}

GapScan case2_gap_scan(double beta, int N2, std::size_t samples, std::uint64_t seed, int low_radius) {
  check_beta(beta);
  if (low_radius < 0 || N2 < 1) throw std::invalid_argument("case2_gap_scan: bad radii");
  if (N2 < 16 * low_radius) throw std::invalid_argument("case2_gap_scan: need N2 >= 16 * low_radius");
  if (samples == 0) throw std::invalid_argument("case2_gap_scan: need at least one sample");

  // uniform lattice point of the box [-R, R]^2 from draw (i, slot, attempt)
  auto draw = [&](std::size_t i, std::uint32_t slot, std::uint32_t attempt, int R) {
    const auto u = uniform_pair(seed, Stream::gap, attempt, slot, i);
    const double span = 2.0 * R + 1.0;
    const int k = std::min(R, static_cast<int>(std::floor((1.0 - u[0]) * span)) - R);
    const int m = std::min(R, static_cast<int>(std::floor((1.0 - u[1]) * span)) - R);
    return TorusMode{k, m};
  };
  auto radius_sq = [](TorusMode n) { return static_cast<std::int64_t>(n.k) * n.k + static_cast<std::int64_t>(n.m) * n.m; };

  GapScan g;
  g.min_ratio = std::numeric_limits<double>::infinity();
  g.samples = samples;
  const std::int64_t lo = static_cast<std::int64_t>(N2) * N2;
  const std::int64_t r2 = static_cast<std::int64_t>(low_radius) * low_radius;
  for (std::size_t i = 0; i < samples; ++i) {
    TorusMode n[3];
    for (std::uint32_t slot = 0; slot < 3; ++slot) {
      const int R = slot == 1 ? 2 * N2 : low_radius;
      for (std::uint32_t attempt = 0;; ++attempt) {
        const TorusMode c = draw(i, slot, attempt, R);
        const std::int64_t r = radius_sq(c);
        const bool ok = slot == 1 ? (r >= lo && r < 4 * lo) : r <= r2;
        if (ok) {
          n[slot] = c;
          break;
        }
      }
    }
    const double ratio = std::abs(phi_resonance(beta, n[0], n[1], n[2])) / static_cast<double>(lo);
    g.min_ratio = std::min(g.min_ratio, ratio);
    g.max_ratio = std::max(g.max_ratio, ratio);
  }
  return g;
}

}  // namespace picardlab::torus
