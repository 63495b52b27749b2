#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "picardlab/concentration.hpp"
#include "picardlab/harmonics.hpp"
#include "picardlab/harness.hpp"
#include "picardlab/moment_oracle.hpp"
#include "picardlab/picard_sphere.hpp"
#include "picardlab/random_field.hpp"
#include "picardlab/torus.hpp"

namespace py = pybind11;
using namespace picardlab;

namespace {

// Coefficients in degree-major order (n, k) = (0,0), (1,-1), (1,0), ...
py::array_t<cplx> to_array(const SpectralField& f) {
  const auto c = f.coeffs();
  py::array_t<cplx> out(static_cast<py::ssize_t>(c.size()));
  std::copy(c.begin(), c.end(), out.mutable_data());
  return out;
}

ExperimentConfig config_from(const std::string& text, std::optional<std::uint64_t> seed) {
  auto c = parse_config(text);
  if (seed) c.seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compiled core of picardlab";
  m.attr("__version__") = PICARDLAB_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // harmonics
  m.def("eigenvalue_sq", &harmonics::eigenvalue_sq, py::arg("n"));
  m.def("cluster_cutoff", &harmonics::cluster_cutoff, py::arg("N"));
  m.def(
      "eval_harmonic",
      [](int n, int k, double theta, double phi) { return harmonics::eval_harmonic({n, k}, theta, phi); },
      py::arg("n"), py::arg("k"), py::arg("theta"), py::arg("phi"));

  // random data and the Picard split
  m.def(
      "sample_phi",
      [](std::uint64_t seed, std::uint64_t sample_id, double alpha, int N) {
        return to_array(random_field::sample_phi(seed, sample_id, alpha, N));
      },
      py::arg("seed"), py::arg("sample_id"), py::arg("alpha"), py::arg("N"));
  m.def("resonance", &picard::resonance, py::arg("n0"), py::arg("n1"), py::arg("n2"), py::arg("n3"));
  m.def("time_factor", &picard::time_factor, py::arg("t"), py::arg("omega"));
  m.def("data_weight", &picard::data_weight, py::arg("n"), py::arg("alpha"));
  m.def(
      "picard_terms",
      [](std::uint64_t seed, std::uint64_t sample_id, double t, double alpha, int N) {
        const auto sample = GaussianSample::draw(seed, sample_id, alpha, harmonics::cluster_cutoff(N));
        PicardTerms p;
        {
          py::gil_scoped_release release;
          p = picard::assemble(sample, t, alpha, N);
        }
        py::dict d;
        d["I"] = to_array(p.term_I);
        d["II"] = to_array(p.term_II);
        d["III"] = to_array(p.term_III);
        return d;
      },
      py::arg("seed"), py::arg("sample_id"), py::arg("t"), py::arg("alpha"), py::arg("N"),
      "Coefficient arrays of the three terms for one random datum.");

  // closed-form moments
  m.def(
      "pair_moment",
      [](int n0, int n1, int n2) { return moments::pair_moment(n0, n1, n2, moments::min_quad_nodes(n0, n1, n2)); },
      py::arg("n0"), py::arg("n1"), py::arg("n2"));
  m.def(
      "expected_II_sq",
      [](double t, double alpha, int N, int n2_max, int threads) {
        py::gil_scoped_release release;
        const auto r = moments::expected_II_sq(t, alpha, N, n2_max, threads);
        return std::make_pair(r.total, r.resonant);
      },
      py::arg("t"), py::arg("alpha"), py::arg("N"), py::arg("n2_max") = -1, py::arg("threads") = 1,
      "(total, resonant) expected squared H^{alpha-1} norm of the second term.");
  m.def("equatorial_term", &moments::equatorial_term, py::arg("n"), py::arg("k"));
  m.def("equatorial_diagnostic", &moments::equatorial_diagnostic, py::arg("N"));

  // concentration
  m.def(
      "band_mass", [](int n, int k, double delta) { return concentration::band_mass({n, k}, BandSpec(delta)); },
      py::arg("n"), py::arg("k"), py::arg("delta"));
  m.def(
      "window_edge", [](int n, double delta) { return concentration::window_edge(n, BandSpec(delta)); }, py::arg("n"),
      py::arg("delta"));
  m.def(
      "lp_norm", [](int n, int k, double p) { return concentration::lp_norm({n, k}, p); }, py::arg("n"), py::arg("k"),
      py::arg("p"));

  // torus
  m.def(
      "torus_expected_iterate_sq",
      [](double beta, double s, double t, int N, bool surrogate, int threads) {
        TorusConfig c{beta, s, t, N};
        TorusOptions o;
        o.threads = threads;
        py::gil_scoped_release release;
        return torus::expected_iterate_sq_torus(c, surrogate ? KernelMode::surrogate : KernelMode::exact_time, o);
      },
      py::arg("beta"), py::arg("s"), py::arg("t"), py::arg("N"), py::arg("surrogate") = false, py::arg("threads") = 1);
  m.def(
      "lattice_count",
      [](int N1, std::pair<int, int> m0, std::int64_t l, double delta, double beta) {
        return torus::lattice_count(N1, {m0.first, m0.second}, l, delta, beta);
      },
      py::arg("N1"), py::arg("m0"), py::arg("l"), py::arg("delta"), py::arg("beta"));

  // harness
  m.def("experiments", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : experiments()) out.emplace_back(e.name, e.summary);
    return out;
  });
  m.def(
      "fit_log_growth",
      [](const std::vector<double>& N, const std::vector<double>& v) {
        if (N.size() != v.size()) throw std::invalid_argument("N and values differ in length");
        std::vector<SeriesPoint> pts;
        for (std::size_t i = 0; i < N.size(); ++i) pts.push_back({N[i], v[i], 0.0});
        const auto f = fit_log_growth(pts);
        return py::make_tuple(f.intercept, f.slope, f.r_squared);
      },
      py::arg("N"), py::arg("values"), "(intercept, slope, r_squared) of v = a + b ln N.");
  m.def(
      "run_experiment_json",
      [](const std::string& config_text, std::optional<std::uint64_t> seed, int threads, bool include_run) {
        const auto c = config_from(config_text, seed);
        std::string out;
        {
          py::gil_scoped_release release;
          out = record_to_json(run_experiment(c, {threads}), include_run).dump();
        }
        return out;
      },
      py::arg("config_text"), py::arg("seed") = py::none(), py::arg("threads") = 1, py::arg("include_run") = true);
}
