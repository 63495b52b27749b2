#include "picardlab/sphere_transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "picardlab/quadrature.hpp"

namespace picardlab {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

}  // namespace

// ---------------------------------------------------------------- SpectralField

SpectralField::SpectralField(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("SpectralField: n_max must be >= 0");
  coeffs_.assign(size_for(n_max), cplx{});
}

double SpectralField::norm_sq() const {
  double s = 0.0;
  for (const cplx& c : coeffs_) s += std::norm(c);
  return s;
}

double SpectralField::cluster_norm_sq(int n) const {
  if (n > n_max_) return 0.0;
  double s = 0.0;
  for (const cplx& c : cluster(n)) s += std::norm(c);
  return s;
}

bool SpectralField::all_finite() const {
  for (const cplx& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

SpectralField SpectralField::resized(int n_max) const {
  SpectralField out(n_max);
  const std::size_t keep = size_for(std::min(n_max, n_max_));
  std::copy_n(coeffs_.begin(), keep, out.coeffs_.begin());
  return out;
}

void SpectralField::add_scaled(const SpectralField& other, cplx scale) {
  if (other.n_max_ > n_max_) *this = resized(other.n_max_);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += scale * other.coeffs_[i];
}

SpectralField& SpectralField::operator*=(cplx scale) {
  for (cplx& c : coeffs_) c *= scale;
  return *this;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  SpectralField out = a;
  out.add_scaled(b, 1.0);
  return out;
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  SpectralField out = a;
  out.add_scaled(b, -1.0);
  return out;
}

// ------------------------------------------------------------------- SphereGrid

int smooth_phi_count(int lower_bound) {
  int m = std::max(2, lower_bound);
  if (m % 2) ++m;
  for (;; m += 2) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

SphereGrid::SphereGrid(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("SphereGrid: n_max must be >= 0");
  if (n_max > 8192) throw std::length_error("SphereGrid: n_max too large");
  const int count = 2 * n_max + 2;
  phi_count_ = smooth_phi_count(4 * n_max + 2);
  const GaussLegendreRule rule = gauss_legendre(count);
  cos_theta_ = rule.nodes;
  weights_.resize(rule.weights.size());
  sin_theta_.resize(rule.nodes.size());
  theta_.resize(rule.nodes.size());
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    weights_[j] = 0.5 * rule.weights[j];
    theta_[j] = std::acos(rule.nodes[j]);
    sin_theta_[j] = std::sqrt((1.0 - rule.nodes[j]) * (1.0 + rule.nodes[j]));
  }

  std::vector<cplx> a(static_cast<std::size_t>(phi_count_));
  std::vector<cplx> b(static_cast<std::size_t>(phi_count_));
  std::lock_guard lock(fftw_planner_mutex());
  plan_forward_ = fftw_plan_dft_1d(phi_count_, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_backward_ = fftw_plan_dft_1d(phi_count_, as_fftw(a.data()), as_fftw(b.data()),
                                    FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SphereGrid::~SphereGrid() {
  std::lock_guard lock(fftw_planner_mutex());
  if (plan_forward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_backward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
}

std::shared_ptr<const SphereGrid> SphereGrid::shared(int n_max) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SphereGrid>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n_max);
  if (it != cache.end()) return it->second;
  auto grid = std::make_shared<const SphereGrid>(n_max);
  cache.emplace(n_max, grid);
  return grid;
}

std::shared_ptr<const SphereGrid> SphereGrid::for_degree(int total_degree) {
  return shared(std::max(0, (total_degree + 3) / 4));
}

double SphereGrid::phi(int l) const { return 2.0 * std::numbers::pi * l / phi_count_; }

const harmonics::LegendreRecurrence& SphereGrid::legendre() const {
  std::call_once(legendre_once_,
                 [this] { legendre_ = std::make_unique<harmonics::LegendreRecurrence>(exact_degree()); });
  return *legendre_;
}

void SphereGrid::fft_forward(std::span<const cplx> in, std::span<cplx> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(in.data()), as_fftw(out.data()));
}

void SphereGrid::fft_backward(std::span<const cplx> in, std::span<cplx> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(in.data()), as_fftw(out.data()));
}

namespace sphere {

SphereGrid build_grid(int n_max) { return SphereGrid(n_max); }

GridValues synthesize(const SpectralField& field, const SphereGrid& grid) {
  const int n_top = field.n_max();
  if (2 * n_top + 1 > grid.phi_count() || n_top > grid.exact_degree()) {
    throw BandLimitError("synthesize: field degree " + std::to_string(n_top) +
                         " exceeds grid support");
  }
  const auto& leg = grid.legendre();
  const int L = grid.theta_count();
  const int M = grid.phi_count();
  const auto cos_t = grid.cos_theta();
  const auto sin_t = grid.sin_theta();

  GridValues values(grid.size());
  std::vector<double> col(static_cast<std::size_t>(n_top) + 1);
  std::vector<cplx> north(static_cast<std::size_t>(M));
  std::vector<cplx> south(static_cast<std::size_t>(M));

  for (int j = 0; j < L / 2; ++j) {
    const int js = L - 1 - j;
    std::fill(north.begin(), north.end(), cplx{});
    std::fill(south.begin(), south.end(), cplx{});
    for (int a = 0; a <= n_top; ++a) {
      leg.column(a, n_top, cos_t[static_cast<std::size_t>(j)], sin_t[static_cast<std::size_t>(j)],
                 std::span<double>(col.data(), static_cast<std::size_t>(n_top - a) + 1));
      for (int sign : {1, -1}) {
        if (a == 0 && sign == -1) break;
        const int m = sign * a;
        const double order_sign = (sign == -1 && (a % 2 == 1)) ? -1.0 : 1.0;
        cplx even{}, odd{};
        for (int n = a; n <= n_top; ++n) {
          const cplx term = field(n, m) * col[static_cast<std::size_t>(n - a)];
          if ((n + a) % 2 == 0) {
            even += term;
          } else {
            odd += term;
          }
        }
        const auto slot = static_cast<std::size_t>((m % M + M) % M);
        north[slot] = order_sign * (even + odd);
        south[slot] = order_sign * (even - odd);
      }
    }
    grid.fft_backward(north, std::span<cplx>(values.data() + static_cast<std::size_t>(j) * M,
                                             static_cast<std::size_t>(M)));
    grid.fft_backward(south, std::span<cplx>(values.data() + static_cast<std::size_t>(js) * M,
                                             static_cast<std::size_t>(M)));
  }
  return values;
}

SpectralField analyze(std::span<const cplx> values, const SphereGrid& grid, int n_max_out,
                      int input_degree) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("analyze: value count does not match grid");
  }
  if (n_max_out < 0) throw std::invalid_argument("analyze: n_max_out must be >= 0");
  const int needed = input_degree >= 0 ? input_degree + n_max_out : n_max_out;
  if (needed > grid.exact_degree()) {
    throw BandLimitError("analyze: requested degree " + std::to_string(needed) +
                         " exceeds exact degree " + std::to_string(grid.exact_degree()) +
                         " of the grid");
  }
  const auto& leg = grid.legendre();
  const int L = grid.theta_count();
  const int M = grid.phi_count();
  const auto cos_t = grid.cos_theta();
  const auto sin_t = grid.sin_theta();
  const auto w = grid.theta_weights();

  SpectralField out(n_max_out);
  std::vector<double> col(static_cast<std::size_t>(n_max_out) + 1);
  std::vector<cplx> north(static_cast<std::size_t>(M));
  std::vector<cplx> south(static_cast<std::size_t>(M));
  const double inv_m = 1.0 / M;

  for (int j = 0; j < L / 2; ++j) {
    const int js = L - 1 - j;
    grid.fft_forward(values.subspan(static_cast<std::size_t>(j) * M, static_cast<std::size_t>(M)),
                     north);
    grid.fft_forward(values.subspan(static_cast<std::size_t>(js) * M, static_cast<std::size_t>(M)),
                     south);
    const double wj = w[static_cast<std::size_t>(j)] * inv_m;
    for (int a = 0; a <= n_max_out; ++a) {
      leg.column(a, n_max_out, cos_t[static_cast<std::size_t>(j)],
                 sin_t[static_cast<std::size_t>(j)],
                 std::span<double>(col.data(), static_cast<std::size_t>(n_max_out - a) + 1));
      for (int sign : {1, -1}) {
        if (a == 0 && sign == -1) break;
        const int m = sign * a;
        const double order_sign = (sign == -1 && (a % 2 == 1)) ? -1.0 : 1.0;
        const auto slot = static_cast<std::size_t>((m % M + M) % M);
        const cplx even = (north[slot] + south[slot]) * (wj * order_sign);
        const cplx odd = (north[slot] - south[slot]) * (wj * order_sign);
        for (int n = a; n <= n_max_out; ++n) {
          const double v = col[static_cast<std::size_t>(n - a)];
          out(n, m) += v * (((n + a) % 2 == 0) ? even : odd);
        }
      }
    }
  }
  return out;
}

cplx integrate(std::span<const cplx> values, const SphereGrid& grid) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("integrate: value count does not match grid");
  }
  const int M = grid.phi_count();
  cplx total{};
  for (int j = 0; j < grid.theta_count(); ++j) {
    cplx row{};
    for (int l = 0; l < M; ++l) row += values[static_cast<std::size_t>(j) * M + static_cast<std::size_t>(l)];
    total += row * grid.cell_weight(j);
  }
  return total;
}

double sobolev_norm(const SpectralField& field, double s) {
  double total = 0.0;
  for (int n = 0; n <= field.n_max(); ++n) {
    const double lam2 = static_cast<double>(harmonics::eigenvalue_sq(n));
    total += std::pow(lam2, s) * field.cluster_norm_sq(n);
  }
  return std::sqrt(total);
}

SpectralField project_cluster(const SpectralField& field, int n) {
  SpectralField out(field.n_max());
  if (n < 0 || n > field.n_max()) return out;
  auto src = field.cluster(n);
  std::copy(src.begin(), src.end(), out.cluster(n).begin());
  return out;
}

SpectralField truncate(const SpectralField& field, int N) {
  const int cutoff = std::min(harmonics::cluster_cutoff(N), field.n_max());
  SpectralField out(field.n_max());
  for (int n = 0; n <= cutoff; ++n) {
    auto src = field.cluster(n);
    std::copy(src.begin(), src.end(), out.cluster(n).begin());
  }
  return out;
}

}  // namespace sphere
}  // namespace picardlab
