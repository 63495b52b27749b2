#include "picardlab/random_field.hpp"

#include <cmath>
#include <numbers>

#include "picardlab/parallel.hpp"

namespace picardlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<double, 2> uniform_pair(std::uint64_t seed, Stream stream, std::uint32_t a,
                                   std::uint32_t b, std::uint64_t index) {
  const auto tag = static_cast<std::uint32_t>(stream) << 24;
  const auto out = philox4x32_10(
      {a, (b & 0x00FFFFFFu) | tag, static_cast<std::uint32_t>(index),
       static_cast<std::uint32_t>(index >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

std::pair<double, double> normal_pair(std::uint64_t seed, Stream stream, std::uint32_t a,
                                      std::uint32_t b, std::uint64_t index) {
  const auto [u1, u2] = uniform_pair(seed, stream, a, b, index);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

cplx complex_gaussian(std::uint64_t seed, std::uint64_t sample_id, int n, int k) {
  const auto [gr, gi] = normal_pair(seed, Stream::cluster, static_cast<std::uint32_t>(n + k),
                                    static_cast<std::uint32_t>(n), sample_id);
  return cplx{gr, gi} * std::numbers::sqrt2 * 0.5;
}

GaussianSample GaussianSample::draw(std::uint64_t seed, std::uint64_t sample_id, double alpha,
                                    int n_max) {
  GaussianSample s{seed, sample_id, alpha, SpectralField(n_max)};
  for (int n = 0; n <= n_max; ++n)
    for (int k = -n; k <= n; ++k) s.g(n, k) = complex_gaussian(seed, sample_id, n, k);
  return s;
}

namespace random_field {

ClusterField sample_cluster(std::uint64_t seed, std::uint64_t sample_id, int n) {
  if (n < 0) throw std::invalid_argument("sample_cluster: n must be >= 0");
  ClusterField c{n, SpectralField(n)};
  const double scale = 1.0 / std::sqrt(2.0 * n + 1.0);
  for (int k = -n; k <= n; ++k) c.field(n, k) = scale * complex_gaussian(seed, sample_id, n, k);
  return c;
}

ClusterField cluster_of(const GaussianSample& sample, int n) {
  if (n > sample.n_max()) throw std::out_of_range("cluster_of: degree above the sample cutoff");
  ClusterField c{n, SpectralField(n)};
  const double scale = 1.0 / std::sqrt(2.0 * n + 1.0);
  for (int k = -n; k <= n; ++k) c.field(n, k) = scale * sample.g(n, k);
  return c;
}

SpectralField sample_phi(std::uint64_t seed, std::uint64_t sample_id, double alpha, int N) {
  const int cutoff = harmonics::cluster_cutoff(N);
  SpectralField f(cutoff);
  for (int n = 0; n <= cutoff; ++n) {
    const double w = std::pow(static_cast<double>(harmonics::eigenvalue_sq(n)), -0.5 * alpha);
    for (int k = -n; k <= n; ++k) f(n, k) = w * complex_gaussian(seed, sample_id, n, k);
  }
  return f;
}

double expected_phi_sobolev_sq(double alpha, int N, double s) {
  const int cutoff = harmonics::cluster_cutoff(N);
  double total = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    total += std::pow(static_cast<double>(harmonics::eigenvalue_sq(n)), s - alpha) * (2.0 * n + 1.0);
  }
  return total;
}

SpectralField linear_flow(const SpectralField& field, double t) {
  SpectralField out = field;
  for (int n = 0; n <= field.n_max(); ++n) {
    const cplx phase = std::polar(1.0, -t * static_cast<double>(harmonics::eigenvalue_sq(n)));
    for (cplx& c : out.cluster(n)) c *= phase;
  }
  return out;
}

cplx eval_cluster(const ClusterField& cluster, const SpherePoint& x) {
  cplx v{};
  for (int k = -cluster.n; k <= cluster.n; ++k) {
    v += cluster.field(cluster.n, k) * harmonics::eval_harmonic({cluster.n, k}, x.theta, x.phi);
  }
  return v;
}

MomentReport moment_suite(std::uint64_t seed, int n, const std::vector<double>& p_list,
                          std::size_t sample_count, const MomentOptions& options) {
  if (sample_count < 100) throw std::invalid_argument("moment_suite: need at least 100 samples");
  for (double p : p_list) {
    if (p < 2.0) throw std::invalid_argument("moment_suite: p must be >= 2");
  }
  double p_top = 2.0;
  for (double p : p_list) p_top = std::max(p_top, p);
  auto grid = SphereGrid::for_degree(static_cast<int>(std::ceil(p_top)) * n + 2);

  std::vector<cplx> yx, yy;
  for (int k = -n; k <= n; ++k) {
    yx.push_back(harmonics::eval_harmonic({n, k}, options.x.theta, options.x.phi));
    yy.push_back(harmonics::eval_harmonic({n, k}, options.y.theta, options.y.phi));
  }

  const std::size_t stride = 5 + p_list.size();
  std::vector<double> rows(sample_count * stride);
  parallel_for(sample_count, options.threads, [&](std::size_t s) {
    const ClusterField e = sample_cluster(seed, options.first_sample + s, n);
    cplx ex{}, ey{};
    for (int k = -n; k <= n; ++k) {
      ex += e.field(n, k) * yx[static_cast<std::size_t>(k + n)];
      ey += e.field(n, k) * yy[static_cast<std::size_t>(k + n)];
    }
    const double mass = e.field.cluster_norm_sq(n);
    double* row = rows.data() + s * stride;
    row[0] = std::norm(ex);
    const cplx t1 = ex * std::norm(ey);
    const cplx t2 = ex * mass;
    row[1] = t1.real();
    row[2] = t1.imag();
    row[3] = t2.real();
    row[4] = t2.imag();
    if (!p_list.empty()) {
      const auto vals = sphere::synthesize(e.field, *grid);
      for (std::size_t i = 0; i < p_list.size(); ++i) {
        const double p = p_list[i];
        double acc = 0.0;
        const int M = grid->phi_count();
        for (int j = 0; j < grid->theta_count(); ++j) {
          double rowsum = 0.0;
          for (int l = 0; l < M; ++l) {
            rowsum += std::pow(std::abs(vals[static_cast<std::size_t>(j) * M + static_cast<std::size_t>(l)]), p);
          }
          acc += rowsum * grid->cell_weight(j);
        }
        row[5 + i] = acc;
      }
    }
  });

  auto column = [&](std::size_t c) {
    std::vector<double> col(sample_count);
    for (std::size_t s = 0; s < sample_count; ++s) col[s] = rows[s * stride + c];
    return estimate(col);
  };

  MomentReport r;
  r.n = n;
  r.samples = sample_count;
  r.variance = column(0);
  r.point_third_re = column(1);
  r.point_third_im = column(2);
  r.mass_third_re = column(3);
  r.mass_third_im = column(4);
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    const double p = p_list[i];
    const Estimate raw = column(5 + i);
    const double value = std::pow(raw.mean, 1.0 / p);
    LpMoment m;
    m.p = p;
    m.scaled.mean = value / std::sqrt(p);
    m.scaled.std_error = value / (p * raw.mean) * raw.std_error / std::sqrt(p);
    r.lp.push_back(m);
  }
  return r;
}

}  // namespace random_field
}  // namespace picardlab
