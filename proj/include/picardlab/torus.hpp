#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace picardlab {

/// Frequency n = (k, m) on the torus.
struct TorusMode {
  int k = 0;
  int m = 0;

  friend TorusMode operator+(TorusMode a, TorusMode b) { return {a.k + b.k, a.m + b.m}; }
  friend TorusMode operator-(TorusMode a, TorusMode b) { return {a.k - b.k, a.m - b.m}; }
  friend bool operator==(TorusMode, TorusMode) = default;
};

struct TorusConfig {
  double beta = std::pow(2.0, 0.25);
  double s = 0.0;
  double t = 0.1;
  int N = 4;  // modes with Q(n) <= N^2
};

enum class KernelMode { exact_time, surrogate };

struct TorusOptions {
  int desk_bound = 16;
  int threads = 1;
  // testing aid: drop the n2 != n1, n3 exclusion
  bool include_paired = false;
};

namespace torus {

/// Q(n, n') = k k' + beta^2 m m'.
inline double q_form(double beta, TorusMode a, TorusMode b) {
  return static_cast<double>(a.k) * b.k + beta * beta * static_cast<double>(a.m) * b.m;
}
inline double q_form(double beta, TorusMode a) { return q_form(beta, a, a); }

/// Phi = 2 Q(n1 - n2, n2 - n3).
inline double phi_resonance(double beta, TorusMode n1, TorusMode n2, TorusMode n3) {
  return 2.0 * q_form(beta, n1 - n2, n2 - n3);
}

/// All modes with Q(n) <= N^2, ordered by (k, m).
std::vector<TorusMode> modes(double beta, int N);

/// |chi_t(Phi)|^2 = 4 sin^2(t Phi / 2) / Phi^2, with t^2 at Phi = 0.
double exact_kernel(double t, double phi);

/// sum over n2 not in {n1, n3} of <n1-n2+n3>^{2s} W(Phi) / (<n1>^2 <n2>^2 <n3>^2).
double expected_iterate_sq_torus(const TorusConfig& config, KernelMode mode, const TorusOptions& options = {});

/// The same sum for every N in N_list (ascending) from a single pass at the largest N.
std::vector<double> expected_iterate_sq_torus_series(const TorusConfig& config, const std::vector<int>& N_list,
                                                     KernelMode mode, const TorusOptions& options = {});

/// #{m1 : N1 <= |m1| < 2 N1, |Q(m1, m0) - l| <= delta}, |.| Euclidean. Requires delta < 1/4.
std::int64_t lattice_count(int N1, TorusMode m0, std::int64_t l, double delta, double beta);

/// Nonzero counts for every integer l at once, ascending in l.
std::vector<std::pair<std::int64_t, std::int64_t>> lattice_profile(int N1, TorusMode m0, double delta, double beta);

struct GapScan {
  double min_ratio = 0.0;  // min |Phi| / N2^2
  double max_ratio = 0.0;
  std::size_t samples = 0;
};

/// Samples n2 on the shell N2 <= |n2| < 2 N2 and n1, n3 in the disc |n| <= low_radius.
/// Requires N2 >= 16 low_radius.
GapScan case2_gap_scan(double beta, int N2, std::size_t samples, std::uint64_t seed, int low_radius);

}  // namespace torus
}  // namespace picardlab
