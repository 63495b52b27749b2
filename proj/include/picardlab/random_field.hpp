#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "picardlab/sphere_transform.hpp"
#include "picardlab/statistics.hpp"

namespace picardlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Independent stream families sharing one seed.
enum class Stream : std::uint32_t {
  cluster = 0,
  rotation = 1,
  lattice = 2,
  gap = 3,
  synthetic = 4,
};

/// Two 53-bit uniforms in (0, 1] from the Philox block keyed by
/// (seed, stream, a, b, index). Requires b < 2^24.
std::array<double, 2> uniform_pair(std::uint64_t seed, Stream stream, std::uint32_t a,
                                   std::uint32_t b, std::uint64_t index);

/// Two independent standard normals (Box-Muller on one Philox block).
std::pair<double, double> normal_pair(std::uint64_t seed, Stream stream, std::uint32_t a,
                                      std::uint32_t b, std::uint64_t index);

/// g_{n,k} = (gr + i gi)/sqrt(2) for draw `sample_id`; order-independent.
cplx complex_gaussian(std::uint64_t seed, std::uint64_t sample_id, int n, int k);

/// Complex standard Gaussians g_{n,k}, |k| <= n <= n_max, for one draw.
struct GaussianSample {
  std::uint64_t seed = 0;
  std::uint64_t sample_id = 0;
  double alpha = 1.0;
  SpectralField g;

  int n_max() const { return g.n_max(); }

  static GaussianSample draw(std::uint64_t seed, std::uint64_t sample_id, double alpha, int n_max);
};

/// e_n = (2n+1)^{-1/2} sum_k g_{n,k} Y_{n,k}, carried as a field supported on degree n.
struct ClusterField {
  int n = 0;
  SpectralField field;
};

namespace random_field {

ClusterField sample_cluster(std::uint64_t seed, std::uint64_t sample_id, int n);
ClusterField cluster_of(const GaussianSample& sample, int n);

/// P_{<=N} phi_alpha = sum_{lambda_n <= N} lambda_n^{-alpha} sum_k g_{n,k} Y_{n,k}.
SpectralField sample_phi(std::uint64_t seed, std::uint64_t sample_id, double alpha, int N);

/// Closed form of E ||P_{<=N} phi_alpha||^2_{H^s}.
double expected_phi_sobolev_sq(double alpha, int N, double s);

/// Multiplies degree n by e^{-i t lambda_n^2}.
SpectralField linear_flow(const SpectralField& field, double t);

struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;
};

struct LpMoment {
  double p = 2.0;
  Estimate scaled;  // ||e_n||_{L^p_omega L^p_x} / sqrt(p)
};

struct MomentReport {
  int n = 0;
  std::size_t samples = 0;
  Estimate variance;                      // E|e_n(x)|^2
  Estimate point_third_re, point_third_im;  // E[e_n(x) |e_n(y)|^2]
  Estimate mass_third_re, mass_third_im;    // E[e_n(x) ||e_n||^2]
  std::vector<LpMoment> lp;
};

struct MomentOptions {
  SpherePoint x{0.7, 0.3};
  SpherePoint y{2.1, 4.0};
  std::uint64_t first_sample = 0;
  int threads = 1;
};

MomentReport moment_suite(std::uint64_t seed, int n, const std::vector<double>& p_list,
                          std::size_t sample_count, const MomentOptions& options = {});

/// e_n(x) evaluated directly from the cluster coefficients.
cplx eval_cluster(const ClusterField& cluster, const SpherePoint& x);

}  // namespace random_field
}  // namespace picardlab
