#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "picardlab/random_field.hpp"
#include "picardlab/sphere_transform.hpp"

namespace picardlab {

enum class ResonanceClass { nonpaired, singular, diagonal };

/// Degrees (n0; n1, n2, n3) of one cubic interaction e_{n1} conj(e_{n2}) e_{n3}
/// projected on degree n0.
struct ResonanceQuartet {
  int n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  std::int64_t omega = 0;
  ResonanceClass cls = ResonanceClass::nonpaired;

  static ResonanceQuartet make(int n0, int n1, int n2, int n3);
};

struct PicardTerms {
  double t = 0.0;
  double alpha = 1.0;
  int n_max = 0;
  SpectralField term_I, term_II, term_III;

  SpectralField total() const;
};

struct PicardOptions {
  int threads = 1;
  int brute_force_cutoff = 8;
};

namespace picard {

/// Omega = lambda_{n0}^2 - lambda_{n1}^2 + lambda_{n2}^2 - lambda_{n3}^2.
std::int64_t resonance(int n0, int n1, int n2, int n3);

/// (1 - e^{i t Omega}) / Omega, and -i t at Omega = 0.
cplx time_factor(double t, std::int64_t omega);

/// Amplitude of cluster n in the initial datum: u0 = sum_n weight(n) e_n.
double data_weight(int n, double alpha);

/// (|u|^2 - 2 mass) u pointwise. Rejects a mass that disagrees with the grid
/// quadrature of |u|^2 by more than 1e-8 relative.
sphere::GridValues wick_cubic(std::span<const cplx> values, double mass, const SphereGrid& grid);

/// W_n = |e_n|^2 - ||e_n||^2 on the grid.
std::vector<double> wick_square(const ClusterField& cluster, const SphereGrid& grid);

/// Contribution of one ordered pair (n1 != n2) to II, both pairings included.
SpectralField II_pair_term(const GaussianSample& sample, double t, double alpha, int n1, int n2);

SpectralField assemble_I(const GaussianSample& sample, double t, double alpha, int N,
                         const PicardOptions& options = {});
SpectralField assemble_II(const GaussianSample& sample, double t, double alpha, int N,
                          const PicardOptions& options = {});
/// Contribution of each degree n <= cutoff to III; independent of the cutoff.
std::vector<SpectralField> diagonal_parts(const GaussianSample& sample, double t, double alpha, int cutoff,
                                          const PicardOptions& options = {});
SpectralField assemble_III(const GaussianSample& sample, double t, double alpha, int N,
                           const PicardOptions& options = {});
PicardTerms assemble(const GaussianSample& sample, double t, double alpha, int N,
                     const PicardOptions& options = {});

/// Fewest Simpson nodes accepted by duhamel_oracle.
int min_time_nodes(double t, int N);

/// -i int_0^t e^{i(t-t')(Delta-1)} :|u(t')|^2 u(t'): dt' for the linear flow u of the
/// sample's datum, by composite Simpson over `time_nodes` (odd) nodes.
SpectralField duhamel_oracle(const GaussianSample& sample, double t, int N, int time_nodes);

}  // namespace picard
}  // namespace picardlab
