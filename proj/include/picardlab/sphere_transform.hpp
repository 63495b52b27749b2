#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "picardlab/harmonics.hpp"

namespace picardlab {

/// Thrown when a transform is asked for more degrees than its grid integrates exactly.
class BandLimitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Complex coefficients c_{n,k} for |k| <= n <= n_max, stored degree-major.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int n_max);

  static std::size_t index(int n, int k) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(n + k);
  }
  static std::size_t size_for(int n_max) { return index(n_max + 1, -(n_max + 1)); }

  int n_max() const { return n_max_; }
  cplx& operator()(int n, int k) { return coeffs_[index(n, k)]; }
  const cplx& operator()(int n, int k) const { return coeffs_[index(n, k)]; }

  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> cluster(int n) { return {coeffs_.data() + index(n, -n), 2 * static_cast<std::size_t>(n) + 1}; }
  std::span<const cplx> cluster(int n) const {
    return {coeffs_.data() + index(n, -n), 2 * static_cast<std::size_t>(n) + 1};
  }

  double norm_sq() const;
  double cluster_norm_sq(int n) const;
  bool all_finite() const;

  /// Copy truncated or zero-padded to a new cutoff degree.
  SpectralField resized(int n_max) const;

  /// this += scale * other; grows this field if other has a larger cutoff.
  void add_scaled(const SpectralField& other, cplx scale = 1.0);
  SpectralField& operator*=(cplx scale);

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  int n_max_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);

/// Gauss-Legendre colatitudes times uniform longitudes. Integrates exactly every
/// product of four harmonics of degree <= n_max (total degree 4 n_max).
class SphereGrid {
 public:
  explicit SphereGrid(int n_max);
  ~SphereGrid();
  SphereGrid(const SphereGrid&) = delete;
  SphereGrid& operator=(const SphereGrid&) = delete;

  /// Process-wide cache of immutable grids.
  static std::shared_ptr<const SphereGrid> shared(int n_max);
  /// Smallest grid whose exact degree is at least `total_degree`.
  static std::shared_ptr<const SphereGrid> for_degree(int total_degree);

  int n_max() const { return n_max_; }
  int exact_degree() const { return 4 * n_max_; }
  int theta_count() const { return static_cast<int>(cos_theta_.size()); }
  int phi_count() const { return phi_count_; }
  std::size_t size() const {
    return static_cast<std::size_t>(theta_count()) * static_cast<std::size_t>(phi_count_);
  }

  std::span<const double> cos_theta() const { return cos_theta_; }
  std::span<const double> sin_theta() const { return sin_theta_; }
  std::span<const double> theta() const { return theta_; }
  /// Colatitude weights summing to 1; the full-grid weight is theta_weight / phi_count.
  std::span<const double> theta_weights() const { return weights_; }
  double phi(int l) const;
  double cell_weight(int j) const { return weights_[static_cast<std::size_t>(j)] / phi_count_; }

  const harmonics::LegendreRecurrence& legendre() const;

  /// In-place longitude DFTs. `forward` computes sum_l f_l e^{-i m phi_l};
  /// `backward` computes sum_m F_m e^{+i m phi_l}. Both unnormalized.
  void fft_forward(std::span<const cplx> in, std::span<cplx> out) const;
  void fft_backward(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  int n_max_;
  int phi_count_;
  std::vector<double> cos_theta_, sin_theta_, theta_, weights_;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
  mutable std::once_flag legendre_once_;
  mutable std::unique_ptr<harmonics::LegendreRecurrence> legendre_;
};

/// Smallest even integer >= lower bound whose prime factors are in {2, 3, 5}.
int smooth_phi_count(int lower_bound);

namespace sphere {

using GridValues = std::vector<cplx>;

SphereGrid build_grid(int n_max);

GridValues synthesize(const SpectralField& field, const SphereGrid& grid);

/// Inner products <values | Y_{n,k}> for n <= n_max_out. When `input_degree` is
/// given, the call is rejected unless input_degree + n_max_out fits the grid's
/// exact degree; otherwise n_max_out alone must fit.
SpectralField analyze(std::span<const cplx> values, const SphereGrid& grid, int n_max_out,
                      int input_degree = -1);

/// Grid quadrature of the values under the unit-mass surface measure.
cplx integrate(std::span<const cplx> values, const SphereGrid& grid);

double sobolev_norm(const SpectralField& field, double s);
SpectralField project_cluster(const SpectralField& field, int n);
SpectralField truncate(const SpectralField& field, int N);

}  // namespace sphere
}  // namespace picardlab
