#include "picardlab/picard_sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "picardlab/parallel.hpp"

namespace picardlab {

ResonanceQuartet ResonanceQuartet::make(int n0, int n1, int n2, int n3) {
  ResonanceQuartet q{n0, n1, n2, n3, picard::resonance(n0, n1, n2, n3), ResonanceClass::nonpaired};
  if (n1 == n2 && n2 == n3) {
    q.cls = ResonanceClass::diagonal;
  } else if (n2 == n3 || n2 == n1) {
    q.cls = ResonanceClass::singular;
  }
  return q;
}

SpectralField PicardTerms::total() const {
  SpectralField out = term_I;
  out.add_scaled(term_II);
  out.add_scaled(term_III);
  return out;
}

namespace picard {

namespace {

using harmonics::eigenvalue_sq;

std::shared_ptr<const SphereGrid> product_grid(int cutoff) {
  // cubic products reach degree 3c; analysis to 3c needs 6c
  return SphereGrid::for_degree(std::max(6 * cutoff, 4));
}

sphere::GridValues cluster_values(const GaussianSample& sample, int n, const SphereGrid& grid) {
  return sphere::synthesize(random_field::cluster_of(sample, n).field, grid);
}

void check_sample(const GaussianSample& sample, int cutoff) {
  if (sample.n_max() < cutoff) {
    throw std::invalid_argument("sample cutoff " + std::to_string(sample.n_max()) +
                                " below cluster cutoff " + std::to_string(cutoff));
  }
}

// Adds e^{-i t lambda0^2} chi_t(lambda0^2 - lambda_m^2) * scale * coeffs(n0) for all n0.
void add_with_kernel(SpectralField& out, const SpectralField& coeffs, double t, int m, cplx scale) {
  const std::int64_t lm = eigenvalue_sq(m);
  for (int n0 = 0; n0 <= coeffs.n_max(); ++n0) {
    const std::int64_t l0 = eigenvalue_sq(n0);
    const cplx w = scale * std::polar(1.0, -t * static_cast<double>(l0)) * time_factor(t, l0 - lm);
    auto src = coeffs.cluster(n0);
    auto dst = out.cluster(n0);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += w * src[i];
  }
}

SpectralField reduce(std::vector<SpectralField>& parts, int n_max) {
  SpectralField out(n_max);
  for (const auto& p : parts) out.add_scaled(p);
  return out;
}

}  // namespace

std::int64_t resonance(int n0, int n1, int n2, int n3) {
  return eigenvalue_sq(n0) - eigenvalue_sq(n1) + eigenvalue_sq(n2) - eigenvalue_sq(n3);
}

cplx time_factor(double t, std::int64_t omega) {
  if (omega == 0) return {0.0, -t};
  const double w = static_cast<double>(omega);
  const double h = std::sin(0.5 * t * w);
  return cplx{2.0 * h * h, -std::sin(t * w)} / w;
}

double data_weight(int n, double alpha) {
  return std::pow(static_cast<double>(eigenvalue_sq(n)), -0.5 * (alpha - 0.5));
}

sphere::GridValues wick_cubic(std::span<const cplx> values, double mass, const SphereGrid& grid) {
  if (values.size() != grid.size()) throw std::invalid_argument("wick_cubic: value count does not match grid");
  sphere::GridValues sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = std::norm(values[i]);
  const double quad = sphere::integrate(sq, grid).real();
  const double scale = std::max(std::abs(mass), std::abs(quad));
  if (std::abs(mass - quad) > 1e-8 * scale) {
    throw std::invalid_argument("wick_cubic: mass does not match the grid quadrature of |u|^2");
  }
  sphere::GridValues out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (sq[i].real() - 2.0 * mass) * values[i];
  return out;
}

std::vector<double> wick_square(const ClusterField& cluster, const SphereGrid& grid) {
  const auto v = sphere::synthesize(cluster.field, grid);
  const double mass = cluster.field.cluster_norm_sq(cluster.n);
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::norm(v[i]) - mass;
  return w;
}

SpectralField II_pair_term(const GaussianSample& sample, double t, double alpha, int n1, int n2) {
  if (n1 == n2) throw std::invalid_argument("II_pair_term: n1 must differ from n2");
  const int top = std::max(n1, n2);
  check_sample(sample, top);
  auto grid = product_grid(top);
  const auto e1 = cluster_values(sample, n1, *grid);
  const auto w2 = wick_square(random_field::cluster_of(sample, n2), *grid);
  sphere::GridValues prod(e1.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = e1[i] * w2[i];
  const int deg = n1 + 2 * n2;
  const auto coeffs = sphere::analyze(prod, *grid, deg, deg);
  const double a1 = data_weight(n1, alpha);
  const double a2 = data_weight(n2, alpha);
  SpectralField out(deg);
  add_with_kernel(out, coeffs, t, n1, 2.0 * a1 * a2 * a2);
  return out;
}

SpectralField assemble_II(const GaussianSample& sample, double t, double alpha, int N,
                          const PicardOptions& options) {
  const int c = harmonics::cluster_cutoff(N);
  check_sample(sample, c);
  auto grid = product_grid(c);
  const std::size_t G = grid->size();

  std::vector<double> a(static_cast<std::size_t>(c) + 1);
  for (int n = 0; n <= c; ++n) a[static_cast<std::size_t>(n)] = data_weight(n, alpha);

  std::vector<sphere::GridValues> e(static_cast<std::size_t>(c) + 1);
  std::vector<std::vector<double>> W(static_cast<std::size_t>(c) + 1);
  parallel_for(static_cast<std::size_t>(c) + 1, options.threads, [&](std::size_t n) {
    const auto cl = random_field::cluster_of(sample, static_cast<int>(n));
    e[n] = sphere::synthesize(cl.field, *grid);
    W[n].resize(G);
    const double mass = cl.field.cluster_norm_sq(cl.n);
    for (std::size_t i = 0; i < G; ++i) W[n][i] = std::norm(e[n][i]) - mass;
  });
  std::vector<double> S(G, 0.0);
  for (int n = 0; n <= c; ++n) {
    const double w = a[static_cast<std::size_t>(n)] * a[static_cast<std::size_t>(n)];
    for (std::size_t i = 0; i < G; ++i) S[i] += w * W[static_cast<std::size_t>(n)][i];
  }

  std::vector<SpectralField> parts(static_cast<std::size_t>(c) + 1);
  parallel_for(parts.size(), options.threads, [&](std::size_t n1) {
    const double a1 = a[n1];
    sphere::GridValues prod(G);
    for (std::size_t i = 0; i < G; ++i) prod[i] = e[n1][i] * (S[i] - a1 * a1 * W[n1][i]);
    const int deg = static_cast<int>(n1) + 2 * c;
    const auto coeffs = sphere::analyze(prod, *grid, deg, deg);
    SpectralField out(deg);
    add_with_kernel(out, coeffs, t, static_cast<int>(n1), 2.0 * a1);
    parts[n1] = std::move(out);
  });
  return reduce(parts, 3 * c);
}

std::vector<SpectralField> diagonal_parts(const GaussianSample& sample, double t, double alpha, int cutoff,
                                          const PicardOptions& options) {
  check_sample(sample, cutoff);
  std::vector<SpectralField> parts(static_cast<std::size_t>(cutoff) + 1);
  parallel_for(parts.size(), options.threads, [&](std::size_t idx) {
    const int n = static_cast<int>(idx);
    auto grid = product_grid(n);
    const auto cl = random_field::cluster_of(sample, n);
    const auto v = sphere::synthesize(cl.field, *grid);
    sphere::GridValues cube(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) cube[i] = std::norm(v[i]) * v[i];
    const auto coeffs = sphere::analyze(cube, *grid, 3 * n, 3 * n);
    const double an = data_weight(n, alpha);
    const double a3 = an * an * an;
    SpectralField out(3 * n);
    add_with_kernel(out, coeffs, t, n, a3);
    // resonant mass subtraction, -2 ||e_n||^2 e_n with the Omega = 0 kernel
    const cplx w = -2.0 * a3 * cl.field.cluster_norm_sq(n) *
                   std::polar(1.0, -t * static_cast<double>(eigenvalue_sq(n))) * time_factor(t, 0);
    auto dst = out.cluster(n);
    auto src = cl.field.cluster(n);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += w * src[i];
    parts[idx] = std::move(out);
  });
  return parts;
}

SpectralField assemble_III(const GaussianSample& sample, double t, double alpha, int N,
                           const PicardOptions& options) {
  const int c = harmonics::cluster_cutoff(N);
  auto parts = diagonal_parts(sample, t, alpha, c, options);
  return reduce(parts, 3 * c);
}

SpectralField assemble_I(const GaussianSample& sample, double t, double alpha, int N,
                         const PicardOptions& options) {
  const int c = harmonics::cluster_cutoff(N);
  if (c > options.brute_force_cutoff) {
    throw std::invalid_argument("assemble_I: cutoff " + std::to_string(c) +
                                " above the brute-force bound " +
                                std::to_string(options.brute_force_cutoff));
  }
  check_sample(sample, c);
  auto grid = product_grid(c);
  const std::size_t G = grid->size();
  std::vector<sphere::GridValues> e(static_cast<std::size_t>(c) + 1);
  for (int n = 0; n <= c; ++n) e[static_cast<std::size_t>(n)] = cluster_values(sample, n, *grid);

  struct Triple {
    int n1, n2, n3;
  };
  std::vector<Triple> triples;
  for (int n1 = 0; n1 <= c; ++n1)
    for (int n2 = 0; n2 <= c; ++n2)
      for (int n3 = 0; n3 <= c; ++n3)
        if (n2 != n1 && n2 != n3) triples.push_back({n1, n2, n3});

  std::vector<SpectralField> parts(triples.size());
  parallel_for(triples.size(), options.threads, [&](std::size_t idx) {
    const auto [n1, n2, n3] = triples[idx];
    const auto& e1 = e[static_cast<std::size_t>(n1)];
    const auto& e2 = e[static_cast<std::size_t>(n2)];
    const auto& e3 = e[static_cast<std::size_t>(n3)];
    sphere::GridValues prod(G);
    for (std::size_t i = 0; i < G; ++i) prod[i] = e1[i] * std::conj(e2[i]) * e3[i];
    const int deg = n1 + n2 + n3;
    const auto coeffs = sphere::analyze(prod, *grid, deg, deg);
    const double amp = data_weight(n1, alpha) * data_weight(n2, alpha) * data_weight(n3, alpha);
    SpectralField out(deg);
    for (int n0 = 0; n0 <= deg; ++n0) {
      const cplx w = amp * std::polar(1.0, -t * static_cast<double>(eigenvalue_sq(n0))) *
                     time_factor(t, resonance(n0, n1, n2, n3));
      auto src = coeffs.cluster(n0);
      auto dst = out.cluster(n0);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = w * src[i];
    }
    parts[idx] = std::move(out);
  });
  return reduce(parts, 3 * c);
}

PicardTerms assemble(const GaussianSample& sample, double t, double alpha, int N,
                     const PicardOptions& options) {
  PicardTerms terms;
  terms.t = t;
  terms.alpha = alpha;
  terms.n_max = harmonics::cluster_cutoff(N);
  terms.term_I = assemble_I(sample, t, alpha, N, options);
  terms.term_II = assemble_II(sample, t, alpha, N, options);
  terms.term_III = assemble_III(sample, t, alpha, N, options);
  return terms;
}

int min_time_nodes(double t, int N) {
  const int c = harmonics::cluster_cutoff(N);
  const double need = 50.0 * (1.0 + std::abs(t) * static_cast<double>(eigenvalue_sq(3 * c)));
  int nodes = static_cast<int>(std::ceil(need));
  if (nodes % 2 == 0) ++nodes;
  return nodes;
}

SpectralField duhamel_oracle(const GaussianSample& sample, double t, int N, int time_nodes) {
  const int c = harmonics::cluster_cutoff(N);
  check_sample(sample, c);
  if (time_nodes % 2 == 0) throw std::invalid_argument("duhamel_oracle: time_nodes must be odd");
  if (time_nodes < min_time_nodes(t, N)) {
    throw std::invalid_argument("duhamel_oracle: " + std::to_string(time_nodes) +
                                " time nodes cannot resolve the fastest phase; need " +
                                std::to_string(min_time_nodes(t, N)));
  }
  SpectralField out(3 * c);
  if (t == 0.0) return out;

  SpectralField u0(c);
  double mass = 0.0;
  for (int n = 0; n <= c; ++n) {
    const auto cl = random_field::cluster_of(sample, n);
    const double a = data_weight(n, sample.alpha);
    auto src = cl.field.cluster(n);
    auto dst = u0.cluster(n);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = a * src[i];
    mass += u0.cluster_norm_sq(n);
  }
  auto grid = product_grid(c);
  const double h = t / (time_nodes - 1);
  for (int j = 0; j < time_nodes; ++j) {
    const double tp = h * j;
    const double simpson = (j == 0 || j == time_nodes - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    const auto values = sphere::synthesize(random_field::linear_flow(u0, tp), *grid);
    const auto coeffs = sphere::analyze(wick_cubic(values, mass, *grid), *grid, 3 * c, 3 * c);
    for (int n0 = 0; n0 <= 3 * c; ++n0) {
      const cplx w = simpson * h / 3.0 * cplx{0.0, -1.0} *
                     std::polar(1.0, -(t - tp) * static_cast<double>(eigenvalue_sq(n0)));
      auto src = coeffs.cluster(n0);
      auto dst = out.cluster(n0);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] += w * src[i];
    }
  }
  return out;
}

}  // namespace picard
}  // namespace picardlab
