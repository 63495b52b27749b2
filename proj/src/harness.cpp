#include "picardlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "picardlab/concentration.hpp"
#include "picardlab/moment_oracle.hpp"
#include "picardlab/parallel.hpp"
#include "picardlab/picard_sphere.hpp"
#include "picardlab/random_field.hpp"
#include "picardlab/torus.hpp"

namespace picardlab {

using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("config: cannot parse '" + text + "' for key " + key);
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("config: duplicate key " + key);
    if (value.empty()) throw ConfigError("config: empty value for key " + key);

    if (key == "experiment") {
      c.experiment = value;
    } else if (key == "alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "t") {
      c.t = parse_number<double>(key, value);
    } else if (key == "s") {
      c.s = parse_number<double>(key, value);
    } else if (key == "beta") {
      c.beta = parse_number<double>(key, value);
    } else if (key == "delta") {
      c.delta = parse_number<double>(key, value);
    } else if (key == "N_list") {
      std::string item;
      std::string normalized = value;
      std::replace(normalized.begin(), normalized.end(), ',', ' ');
      std::istringstream items(normalized);
      while (items >> item) c.N_list.push_back(parse_number<int>(key, item));
      if (c.N_list.empty()) throw ConfigError("config: N_list is empty");
    } else if (key == "samples") {
      c.samples = parse_number<std::int64_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "n2_max") {
      c.n2_max = value == "full" ? -1 : parse_number<int>(key, value);
    } else if (key == "output_path") {
      c.output_path = value;
    } else {
      throw ConfigError("config: unknown key " + key);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

FitResult fit_log_growth(const std::vector<SeriesPoint>& points) {
  std::set<double> distinct;
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.N > 0.0)) throw std::invalid_argument("fit_log_growth: N must be positive");
    distinct.insert(p.N);
    x.push_back(std::log(p.N));
    y.push_back(p.value);
  }
  if (distinct.size() < 3) throw std::invalid_argument("fit_log_growth: need at least three distinct N");
  const LinearFit f = fit_linear(x, y);
  return {f.intercept, f.slope, std::clamp(f.r_squared, 0.0, 1.0), f.slope_std_error};
}

bool ExperimentRecord::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

json record_to_json(const ExperimentRecord& r, bool include_run) {
  json j;
  j["experiment"] = r.experiment;
  j["config"] = r.config;
  json series = json::array();
  for (const auto& p : r.series) series.push_back({{"N", p.N}, {"value", p.value}, {"stderr", p.std_error}});
  j["series"] = series;
  if (r.fit) {
    j["fit"] = {{"model", r.fit_model},
                {"intercept", r.fit->intercept},
                {"slope", r.fit->slope},
                {"r_squared", r.fit->r_squared},
                {"slope_stderr", r.fit->slope_std_error}};
  } else {
    j["fit"] = nullptr;
  }
  j["metrics"] = r.metrics;
  json gates = json::array();
  for (const auto& g : r.gates) gates.push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
  j["gates"] = gates;
  j["passed"] = r.passed();
  if (include_run) j["run"] = {{"wall_clock_seconds", r.wall_clock_seconds}, {"version", r.version}};
  return j;
}

ExperimentRecord record_from_json(const json& j) {
  ExperimentRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.config = j.at("config");
  for (const auto& p : j.at("series")) {
    r.series.push_back({p.at("N").get<double>(), p.at("value").get<double>(), p.at("stderr").get<double>()});
  }
  if (!j.at("fit").is_null()) {
    const auto& f = j.at("fit");
    r.fit_model = f.at("model").get<std::string>();
    r.fit = FitResult{f.at("intercept").get<double>(), f.at("slope").get<double>(), f.at("r_squared").get<double>(),
                      f.at("slope_stderr").get<double>()};
  }
  r.metrics = j.at("metrics");
  for (const auto& g : j.at("gates")) {
    r.gates.push_back({g.at("name").get<std::string>(), g.at("passed").get<bool>(), g.at("detail").get<std::string>()});
  }
  if (j.contains("run")) {
    r.wall_clock_seconds = j.at("run").at("wall_clock_seconds").get<double>();
    r.version = j.at("run").at("version").get<std::string>();
  }
  return r;
}

std::string series_csv(const ExperimentRecord& record) {
  std::string out = "N,value,stderr\n";
  for (const auto& p : record.series) out += fmt17(p.N) + "," + fmt17(p.value) + "," + fmt17(p.std_error) + "\n";
  return out;
}

void write_outputs(const ExperimentRecord& record, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto put = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) throw std::runtime_error("write failed: " + p.string());
  };
  put(dir / "record.json", record_to_json(record).dump(2) + "\n");
  put(dir / "series.csv", series_csv(record));
}

int threads_from_env() {
  const char* v = std::getenv("PICARDLAB_THREADS");
  if (v == nullptr) return 1;
  int n = 0;
  const std::string s(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size() || n < 1) return 1;
  return n;
}

namespace {

enum Key : unsigned { kAlpha = 1, kT = 2, kS = 4, kBeta = 8, kDelta = 16, kSamples = 32, kSeed = 64, kN2 = 128 };

struct Entry {
  ExperimentInfo info;
  unsigned keys;
  ExperimentConfig defaults;
  std::function<void(const ExperimentConfig&, const RunOptions&, ExperimentRecord&)> run;
};

const double kBetaDefault = std::pow(2.0, 0.25);

ExperimentConfig defaults(std::vector<int> N_list) {
  ExperimentConfig c;
  c.N_list = std::move(N_list);
  return c;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

void gate(ExperimentRecord& r, std::string name, bool ok, std::string detail) {
  r.gates.push_back({std::move(name), ok, std::move(detail)});
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"stderr", e.std_error}}; }

std::string within_detail(const Estimate& e, double target) {
  return "mean " + fmt(e.mean) + ", target " + fmt(target) + ", SE " + fmt(e.std_error);
}

FitResult fit_log_log(const std::vector<SeriesPoint>& series) {
  std::vector<SeriesPoint> logs;
  for (const auto& p : series) logs.push_back({p.N, std::log(p.value), 0.0});
  return fit_log_growth(logs);
}

// Uniform point on the sphere from one Philox block.
random_field::SpherePoint sphere_point(std::uint64_t seed, std::uint64_t index) {
  const auto u = uniform_pair(seed, Stream::synthetic, 0, 0, index);
  return {std::acos(1.0 - 2.0 * u[0]), 2.0 * std::numbers::pi * u[1]};
}

// ---------------------------------------------------------------------------

void run_weyl(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  const auto points = static_cast<std::size_t>(*c.samples);
  std::vector<double> worst(c.N_list.size());
  parallel_for(c.N_list.size(), o.threads, [&](std::size_t i) {
    const int n = c.N_list[i];
    double w = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
      const auto x = sphere_point(*c.seed, p);
      double sum = 0.0;
      for (int k = -n; k <= n; ++k) sum += std::norm(harmonics::eval_harmonic({n, k}, x.theta, x.phi));
      w = std::max(w, std::abs(sum / (2.0 * n + 1.0) - 1.0));
    }
    worst[i] = w;
  });
  double all = 0.0;
  for (std::size_t i = 0; i < worst.size(); ++i) {
    r.series.push_back({static_cast<double>(c.N_list[i]), worst[i], 0.0});
    all = std::max(all, worst[i]);
  }
  gate(r, "weyl_identity", all <= 1e-9, "max deviation " + fmt(all) + " <= 1e-09");
}

void run_concentration(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  const BandSpec band(*c.delta);
  const auto scan = concentration::concentration_scan(band, c.N_list, o.threads);
  json rows = json::array();
  double first_scaled = 0.0, max_scaled = 0.0;
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    const auto& row = scan.rows[i];
    const double scaled = static_cast<double>(row.n) * row.n * row.mass_edge;
    if (i == 0) first_scaled = scaled;
    max_scaled = std::max(max_scaled, scaled);
    r.series.push_back({static_cast<double>(row.n), row.mass_edge, 0.0});
    rows.push_back({{"n", row.n},
                    {"k_edge", row.k_edge},
                    {"mass_edge", row.mass_edge},
                    {"mass_top", row.mass_top},
                    {"mass_edge_turning_point", row.mass_edge_turn},
                    {"n2_mass_edge", scaled}});
  }
  r.metrics["rows"] = rows;
  r.metrics["top_fit_slope"] = scan.top_fit.slope;
  r.fit = FitResult{scan.edge_fit.intercept, scan.edge_fit.slope, scan.edge_fit.r_squared, scan.edge_fit.slope_std_error};
  r.fit_model = "ln value ~ ln N";
  gate(r, "edge_slope", scan.edge_fit.slope <= -1.7, "slope " + fmt(scan.edge_fit.slope) + " <= -1.7");
  gate(r, "scaled_mass_bounded", max_scaled <= 10.0 * first_scaled,
       "max n^2 mass " + fmt(max_scaled) + " <= 10 x " + fmt(first_scaled));
  bool top_faster = true;
  for (const auto& row : scan.rows) top_faster = top_faster && row.mass_top <= row.mass_edge;
  gate(r, "highest_weight_concentrates_hardest", top_faster, "mass(k=n) <= mass(k_edge) at every n");
}

void run_l4(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  std::vector<double> l4(c.N_list.size()), l6_ratio(c.N_list.size());
  parallel_for(c.N_list.size(), o.threads, [&](std::size_t i) {
    const int n = c.N_list[i];
    l4[i] = concentration::lp_norm({n, n}, 4.0);
    l6_ratio[i] = concentration::lp_norm({n, n}, 6.0) / std::pow(harmonics::eigenvalue(n), 1.0 / 6.0);
  });
  json ratios = json::array();
  for (std::size_t i = 0; i < l4.size(); ++i) {
    const int n = c.N_list[i];
    r.series.push_back({static_cast<double>(n), l4[i], 0.0});
    ratios.push_back({{"n", n},
                      {"l4_over_lambda_eighth", l4[i] / std::pow(harmonics::eigenvalue(n), 0.125)},
                      {"l6_over_lambda_sixth", l6_ratio[i]}});
  }
  r.metrics["sogge_ratios"] = ratios;
  r.fit = fit_log_log(r.series);
  r.fit_model = "ln value ~ ln N";
  gate(r, "l4_exponent", r.fit->slope >= 0.10 && r.fit->slope <= 0.15,
       "exponent " + fmt(r.fit->slope) + " in [0.10, 0.15]");
}

void run_moments(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  random_field::MomentOptions mo;
  mo.threads = o.threads;
  json per_n = json::array();
  for (int n : c.N_list) {
    const auto rep = random_field::moment_suite(*c.seed, n, {2.0, 4.0, 6.0}, static_cast<std::size_t>(*c.samples), mo);
    r.series.push_back({static_cast<double>(n), rep.variance.mean, rep.variance.std_error});
    json lp = json::array();
    bool lp_ok = true;
    for (const auto& m : rep.lp) {
      lp.push_back({{"p", m.p}, {"scaled", estimate_json(m.scaled)}});
      lp_ok = lp_ok && m.scaled.mean <= 3.0;
    }
    per_n.push_back({{"n", n},
                     {"variance", estimate_json(rep.variance)},
                     {"point_third_re", estimate_json(rep.point_third_re)},
                     {"point_third_im", estimate_json(rep.point_third_im)},
                     {"mass_third_re", estimate_json(rep.mass_third_re)},
                     {"mass_third_im", estimate_json(rep.mass_third_im)},
                     {"lp", lp}});
    const std::string tag = "n=" + std::to_string(n);
    gate(r, "variance " + tag, rep.variance.within(1.0, 4.0), within_detail(rep.variance, 1.0));
    const bool third = rep.point_third_re.within(0.0, 4.0) && rep.point_third_im.within(0.0, 4.0) &&
                       rep.mass_third_re.within(0.0, 4.0) && rep.mass_third_im.within(0.0, 4.0);
    gate(r, "third_moments " + tag, third,
         "point " + within_detail(rep.point_third_re, 0.0) + "; mass " + within_detail(rep.mass_third_re, 0.0));
    gate(r, "lp_bound " + tag, lp_ok, "||e_n||_p / sqrt(p) <= 3 for p in {2,4,6}");
  }
  r.metrics["moments"] = per_n;
}

void run_orthogonality(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  const int N = c.N_list.front();
  const int cutoff = harmonics::cluster_cutoff(N);
  const auto count = static_cast<std::size_t>(*c.samples);
  std::vector<double> re(count), im(count);
  parallel_for(count, o.threads, [&](std::size_t s) {
    const auto smp = GaussianSample::draw(*c.seed, s, *c.alpha, cutoff);
    const auto terms = picard::assemble(smp, *c.t, *c.alpha, N);
    const auto rest = terms.term_II + terms.term_III;
    cplx ip{};
    const auto a = terms.term_I.coeffs();
    const auto b = rest.coeffs();
    for (std::size_t j = 0; j < a.size(); ++j) ip += a[j] * std::conj(b[j]);
    re[s] = ip.real();
    im[s] = ip.imag();
  });
  const auto er = estimate(re), ei = estimate(im);
  r.series.push_back({static_cast<double>(N), er.mean, er.std_error});
  r.metrics["cutoff"] = cutoff;
  r.metrics["inner_product_re"] = estimate_json(er);
  r.metrics["inner_product_im"] = estimate_json(ei);
  gate(r, "orthogonality_re", er.within(0.0, 4.0), within_detail(er, 0.0));
  gate(r, "orthogonality_im", ei.within(0.0, 4.0), within_detail(ei, 0.0));
}

void run_divergence(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  const int n2 = *c.n2_max;
  bool increasing = true;
  json resonant = json::array();
  for (int N : c.N_list) {
    const auto m = moments::expected_II_sq(*c.t, *c.alpha, N, n2, o.threads);
    if (!r.series.empty()) increasing = increasing && m.total > r.series.back().value;
    r.series.push_back({static_cast<double>(N), m.total, 0.0});
    resonant.push_back(m.resonant);
  }
  r.metrics["resonant"] = resonant;
  r.fit = fit_log_growth(r.series);
  r.fit_model = "value ~ ln N";
  gate(r, "strictly_increasing", increasing, "expected norm increases along N_list");
  gate(r, "slope_positive", r.fit->slope > 0.0, "slope " + fmt(r.fit->slope) + " > 0");
  gate(r, "fit_quality", r.fit->r_squared >= 0.98, "R^2 " + fmt(r.fit->r_squared) + " >= 0.98");
  if (*c.t > 0.0) {
    const int N = c.N_list.back();
    const double a = moments::expected_II_sq(*c.t, *c.alpha, N, n2, o.threads).resonant / (*c.t * *c.t);
    const double h = 0.5 * *c.t;
    const double b = moments::expected_II_sq(h, *c.alpha, N, n2, o.threads).resonant / (h * h);
    const double rel = std::abs(a - b) / std::max(std::abs(a), std::abs(b));
    r.metrics["resonant_over_t2"] = {a, b};
    gate(r, "resonant_t_squared", rel <= 1e-10, "relative difference " + fmt(rel) + " <= 1e-10 between t and t/2");
  }
}

void run_diagnostic(const ExperimentConfig& c, const RunOptions&, ExperimentRecord& r) {
  bool monotone = true;
  for (int N : c.N_list) {
    const double d = moments::equatorial_diagnostic(N);
    if (!r.series.empty()) monotone = monotone && d >= r.series.back().value;
    r.series.push_back({static_cast<double>(N), d, 0.0});
  }
  double top = 0.0;
  const int n_top = c.N_list.back();
  for (int k = -n_top; k <= n_top; ++k) top = std::max(top, moments::equatorial_term(n_top, k));
  r.metrics["highest_weight_term"] = moments::equatorial_term(n_top, n_top);
  r.metrics["max_term_at_top"] = top;
  r.fit = fit_log_growth(r.series);
  r.fit_model = "value ~ ln N";
  gate(r, "nondecreasing", monotone, "D_N nondecreasing along N_list");
  gate(r, "slope_positive", r.fit->slope > 0.0, "slope " + fmt(r.fit->slope) + " > 0");
  gate(r, "fit_quality", r.fit->r_squared >= 0.99, "R^2 " + fmt(r.fit->r_squared) + " >= 0.99");
}

void run_third_term(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  const auto count = static_cast<std::size_t>(*c.samples);
  std::vector<int> cut;
  for (int N : c.N_list) cut.push_back(harmonics::cluster_cutoff(N));
  const int c_top = cut.back();
  const std::size_t L = cut.size();
  std::vector<double> rows(count * L);
  parallel_for(count, o.threads, [&](std::size_t s) {
    const auto smp = GaussianSample::draw(*c.seed, s, *c.alpha, c_top);
    const auto parts = picard::diagonal_parts(smp, *c.t, *c.alpha, c_top);
    SpectralField acc(3 * c_top);
    std::size_t j = 0;
    for (int n = 0; n <= c_top; ++n) {
      acc.add_scaled(parts[static_cast<std::size_t>(n)]);
      while (j < L && cut[j] == n) rows[s * L + j++] = acc.norm_sq();
    }
  });
  std::vector<double> inc;
  for (std::size_t j = 0; j < L; ++j) {
    std::vector<double> col(count), step(count);
    for (std::size_t s = 0; s < count; ++s) {
      col[s] = rows[s * L + j];
      step[s] = rows[s * L + j] - (j > 0 ? rows[s * L + j - 1] : 0.0);
    }
    const auto e = estimate(col);
    r.series.push_back({static_cast<double>(c.N_list[j]), e.mean, e.std_error});
    if (j > 0) inc.push_back(estimate(step).mean);
  }
  r.metrics["increments"] = inc;
  bool decreasing = !inc.empty();
  for (std::size_t i = 1; i < inc.size(); ++i) decreasing = decreasing && inc[i] < inc[i - 1];
  gate(r, "increments_decrease", decreasing, "consecutive increments strictly decrease");
  const double last = inc.empty() ? 0.0 : inc.back();
  const double total = r.series.back().value;
  gate(r, "final_increment_small", last <= 0.25 * total,
       "final increment " + fmt(last) + " <= 25% of " + fmt(total));
}

void run_torus(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  TorusConfig tc;
  tc.beta = *c.beta;
  tc.s = *c.s;
  tc.t = *c.t;
  TorusOptions opt;
  opt.threads = o.threads;
  const auto exact = torus::expected_iterate_sq_torus_series(tc, c.N_list, KernelMode::exact_time, opt);
  const auto sur = torus::expected_iterate_sq_torus_series(tc, c.N_list, KernelMode::surrogate, opt);
  for (std::size_t i = 0; i < exact.size(); ++i) r.series.push_back({static_cast<double>(c.N_list[i]), exact[i], 0.0});
  r.metrics["surrogate"] = sur;
  std::vector<double> inc;
  for (std::size_t i = 1; i < exact.size(); ++i) inc.push_back(exact[i] - exact[i - 1]);
  r.metrics["increments"] = inc;
  bool decay = !inc.empty();
  for (std::size_t i = 1; i < inc.size(); ++i) decay = decay && inc[i] < inc[i - 1];
  gate(r, "increments_decay", decay, "consecutive increments strictly decrease");

  const int top = c.N_list.back();
  const auto half = std::find(c.N_list.begin(), c.N_list.end(), top / 2);
  if (top % 2 == 0 && half != c.N_list.end()) {
    const double v_half = exact[static_cast<std::size_t>(half - c.N_list.begin())];
    gate(r, "doubling_ratio", exact.back() <= 1.2 * v_half,
         "value(" + std::to_string(top) + ") / value(" + std::to_string(top / 2) + ") = " + fmt(exact.back() / v_half) +
             " <= 1.2");
  }
  // same span on the sphere: alpha = 1, n2 <= 8
  const double s0 = moments::expected_II_sq(tc.t, 1.0, c.N_list.front(), 8, o.threads).total;
  const double s1 = moments::expected_II_sq(tc.t, 1.0, top, 8, o.threads).total;
  r.metrics["sphere_span"] = {s0, s1};
  r.metrics["torus_growth"] = exact.back() / exact.front();
  r.metrics["sphere_growth"] = s1 / s0;
  gate(r, "sphere_contrast", s1 >= 1.5 * s0, "sphere growth over the span " + fmt(s1 / s0) + " >= 1.5");
}

void run_lattice(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  const std::vector<TorusMode> m0s{{1, 0}, {1, 1}, {2, 3}};
  const auto targets = static_cast<std::size_t>(*c.samples);
  struct Cell {
    double sampled = 0.0, full = 0.0;
  };
  std::vector<Cell> cells(c.N_list.size() * m0s.size());
  parallel_for(cells.size(), o.threads, [&](std::size_t idx) {
    const std::size_t i = idx / m0s.size(), j = idx % m0s.size();
    const int N1 = c.N_list[i];
    const TorusMode m0 = m0s[j];
    const auto prof = torus::lattice_profile(N1, m0, *c.delta, *c.beta);
    std::map<std::int64_t, std::int64_t> lookup(prof.begin(), prof.end());
    std::int64_t full = 0;
    for (const auto& [l, n] : prof) full = std::max(full, n);
    // targets drawn uniformly from the integer range Q(m1, m0) can reach on the shell
    const double reach = 2.0 * N1 * (std::abs(m0.k) + (*c.beta) * (*c.beta) * std::abs(m0.m));
    const auto lo = static_cast<std::int64_t>(std::floor(-reach));
    const auto span = static_cast<std::int64_t>(std::ceil(reach)) - lo + 1;
    std::int64_t best = 0;
    for (std::size_t q = 0; q < targets; ++q) {
      const auto u = uniform_pair(*c.seed, Stream::lattice, static_cast<std::uint32_t>(N1), static_cast<std::uint32_t>(j), q);
      const std::int64_t l = lo + std::min<std::int64_t>(span - 1, static_cast<std::int64_t>((1.0 - u[0]) * static_cast<double>(span)));
      const auto it = lookup.find(l);
      if (it != lookup.end()) best = std::max(best, it->second);
    }
    cells[idx] = {static_cast<double>(best) / N1, static_cast<double>(full) / N1};
  });
  json table = json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m0s.size(); ++j) {
      const auto& cell = cells[i * m0s.size() + j];
      row = std::max(row, cell.sampled);
      table.push_back({{"N1", c.N_list[i]},
                       {"m0", {m0s[j].k, m0s[j].m}},
                       {"sampled_sup_over_N1", cell.sampled},
                       {"full_sup_over_N1", cell.full}});
    }
    worst = std::max(worst, row);
    r.series.push_back({static_cast<double>(c.N_list[i]), row, 0.0});
  }
  r.metrics["counts"] = table;
  gate(r, "count_over_N1", worst <= 8.0, "sup count / N1 = " + fmt(worst) + " <= 8");
}

void run_oracle_vs_mc(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  const auto count = static_cast<std::size_t>(*c.samples);

  // Wick-square covariance at n = 3 on five point pairs
  {
    const int n = 3;
    const std::size_t draws = 10 * count;
    json pairs = json::array();
    for (std::uint64_t p = 0; p < 5; ++p) {
      const auto x = sphere_point(*c.seed + 1000, 2 * p);
      const auto y = sphere_point(*c.seed + 1000, 2 * p + 1);
      std::vector<cplx> yx, yy;
      cplx K{};
      for (int k = -n; k <= n; ++k) {
        yx.push_back(harmonics::eval_harmonic({n, k}, x.theta, x.phi));
        yy.push_back(harmonics::eval_harmonic({n, k}, y.theta, y.phi));
        K += yx.back() * std::conj(yy.back());
      }
      const double target = std::norm(K) / 49.0 - 1.0 / 7.0;
      std::vector<double> prod(draws);
      parallel_for(draws, o.threads, [&](std::size_t s) {
        const auto e = random_field::sample_cluster(*c.seed + 1 + p, s, n);
        cplx ex{}, ey{};
        for (int k = -n; k <= n; ++k) {
          ex += e.field(n, k) * yx[static_cast<std::size_t>(k + n)];
          ey += e.field(n, k) * yy[static_cast<std::size_t>(k + n)];
        }
        const double m = e.field.norm_sq();
        prod[s] = (std::norm(ex) - m) * (std::norm(ey) - m);
      });
      const auto est = estimate(prod);
      pairs.push_back({{"target", target}, {"mc", estimate_json(est)}});
      gate(r, "wick_covariance pair " + std::to_string(p), est.within(target, 4.0), within_detail(est, target));
    }
    r.metrics["wick_covariance"] = pairs;
  }

  // pair moments against direct sampling
  {
    json triples = json::array();
    for (const auto& [n0, n1, n2] : std::vector<std::array<int, 3>>{{1, 1, 1}, {3, 2, 1}, {4, 2, 3}}) {
      const double closed = moments::pair_moment(n0, n1, n2, moments::min_quad_nodes(n0, n1, n2));
      auto grid = SphereGrid::for_degree(n0 + n1 + 2 * n2);
      std::vector<double> vals(count);
      parallel_for(count, o.threads, [&](std::size_t s) {
        const auto e1 = sphere::synthesize(random_field::sample_cluster(*c.seed + 20, s, n1).field, *grid);
        const auto w2 = picard::wick_square(random_field::sample_cluster(*c.seed + 21, s, n2), *grid);
        sphere::GridValues prod(e1.size());
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = e1[i] * w2[i];
        vals[s] = sphere::analyze(prod, *grid, n0, n1 + 2 * n2).cluster_norm_sq(n0);
      });
      const auto est = estimate(vals);
      triples.push_back({{"n", {n0, n1, n2}}, {"closed", closed}, {"mc", estimate_json(est)}});
      gate(r, "pair_moment (" + std::to_string(n0) + "," + std::to_string(n1) + "," + std::to_string(n2) + ")",
           est.within(closed, 4.0), within_detail(est, closed));
    }
    r.metrics["pair_moments"] = triples;
  }

  json closed_list = json::array();
  for (int N : c.N_list) {
    const int cutoff = harmonics::cluster_cutoff(N);
    const double closed = moments::expected_II_sq(*c.t, *c.alpha, N, *c.n2_max, o.threads).total;
    std::vector<double> vals(count);
    parallel_for(count, o.threads, [&](std::size_t s) {
      const auto smp = GaussianSample::draw(*c.seed, s, *c.alpha, cutoff);
      const double v = sphere::sobolev_norm(picard::assemble_II(smp, *c.t, *c.alpha, N), *c.alpha - 1.0);
      vals[s] = v * v;
    });
    const auto est = estimate(vals);
    r.series.push_back({static_cast<double>(N), est.mean, est.std_error});
    closed_list.push_back(closed);
    gate(r, "oracle_vs_mc N=" + std::to_string(N), est.within(closed, 4.0), within_detail(est, closed));
  }
  r.metrics["closed_form"] = closed_list;
}

void run_small_n(const ExperimentConfig& c, const RunOptions& o, ExperimentRecord& r) {
  PicardOptions po;
  po.threads = o.threads;
  json conv = json::array();
  for (int N : c.N_list) {
    const int cutoff = harmonics::cluster_cutoff(N);
    double worst = 0.0, worst_conv = 0.0;
    for (std::int64_t s = 0; s < *c.samples; ++s) {
      const auto smp = GaussianSample::draw(*c.seed, static_cast<std::uint64_t>(s), *c.alpha, cutoff);
      const auto total = picard::assemble(smp, *c.t, *c.alpha, N, po).total();
      const int nodes = picard::min_time_nodes(*c.t, N);
      const auto oracle = picard::duhamel_oracle(smp, *c.t, N, nodes);
      const auto fine = picard::duhamel_oracle(smp, *c.t, N, 2 * nodes - 1);
      auto rel = [](const SpectralField& a, const SpectralField& b) {
        const double scale = std::max(a.norm_sq(), b.norm_sq());
        return scale > 0.0 ? std::sqrt((a - b).norm_sq() / scale) : 0.0;
      };
      worst = std::max(worst, rel(total, oracle));
      worst_conv = std::max(worst_conv, rel(oracle, fine));
    }
    r.series.push_back({static_cast<double>(N), worst, 0.0});
    conv.push_back(worst_conv);
    const std::string tag = "cutoff=" + std::to_string(cutoff);
    gate(r, "oracle_agreement " + tag, worst <= 1e-6, "relative difference " + fmt(worst) + " <= 1e-06");
    gate(r, "oracle_self_convergence " + tag, worst_conv <= 1e-8, "step halving changes " + fmt(worst_conv) + " <= 1e-08");
  }
  r.metrics["self_convergence"] = conv;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> v;
    auto add = [&](std::string name, std::string summary, unsigned keys, ExperimentConfig d, auto fn) {
      d.experiment = name;
      v.push_back({{std::move(name), std::move(summary)}, keys, std::move(d), fn});
    };
    const std::vector<int> log_span{32, 64, 128, 256, 512};
    {
      auto d = defaults(range(1, 48));
      d.samples = 32;
      d.seed = 1;
      add("weyl-check", "pointwise addition identity for degrees in N_list at `samples` random points",
          kSamples | kSeed, d, run_weyl);
    }
    {
      auto d = defaults(log_span);
      d.delta = 0.3;
      add("concentration", "mass of high-weight harmonics outside the equatorial band", kDelta, d, run_concentration);
    }
    add("l4-growth", "L4 norm of the highest-weight harmonic against the degree", 0u,
        defaults({16, 32, 64, 128, 256, 512}), run_l4);
    {
      auto d = defaults({1, 4, 16});
      d.samples = 10000;
      d.seed = 1;
      add("moments", "variance, third moments and Lp moments of cluster Gaussians", kSamples | kSeed, d, run_moments);
    }
    {
      auto d = defaults({4});
      d.alpha = 1.0;
      d.t = 0.1;
      d.samples = 2000;
      d.seed = 1;
      add("orthogonality", "Monte Carlo mean of <I, II + III>", kAlpha | kT | kSamples | kSeed, d, run_orthogonality);
    }
    {
      auto d = defaults(log_span);
      d.alpha = 1.0;
      d.t = 0.1;
      d.n2_max = 8;
      add("sphere-divergence", "closed-form E||II_N||^2 against ln N", kAlpha | kT | kN2, d, run_divergence);
    }
    add("diagnostic", "equatorial high x low diagnostic D_N against ln N", 0u, defaults(log_span), run_diagnostic);
    {
      auto d = defaults({8, 16, 32, 64});
      d.alpha = 1.0;
      d.t = 0.1;
      d.samples = 500;
      d.seed = 1;
      add("third-term", "Monte Carlo E||III_N||^2 along N_list", kAlpha | kT | kSamples | kSeed, d, run_third_term);
    }
    {
      auto d = defaults({4, 6, 8, 10, 12, 16});
      d.beta = kBetaDefault;
      d.s = 0.45;
      d.t = 0.1;
      add("torus-bounded", "exact second moment of the torus iterate along N_list", kBeta | kS | kT, d, run_torus);
    }
    {
      auto d = defaults({64, 128, 256});
      d.beta = kBetaDefault;
      d.delta = 0.2;
      d.samples = 64;
      d.seed = 1;
      add("lattice-count", "shell lattice counts near level sets of Q(., m0)", kBeta | kDelta | kSamples | kSeed, d,
          run_lattice);
    }
    {
      auto d = defaults({8, 16});
      d.alpha = 1.0;
      d.t = 0.1;
      d.samples = 10000;
      d.seed = 1;
      d.n2_max = -1;
      add("oracle-vs-mc", "closed-form moments against Monte Carlo", kAlpha | kT | kSamples | kSeed | kN2, d,
          run_oracle_vs_mc);
    }
    {
      auto d = defaults({3, 4});
      d.alpha = 1.0;
      d.t = 0.1;
      d.samples = 1;
      d.seed = 1;
      add("small-n-oracle", "three-term split against the time-quadrature oracle", kAlpha | kT | kSamples | kSeed, d,
          run_small_n);
    }
    return v;
  }();
  return entries;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& s : registry())
    if (s.info.name == name) return s;
  throw ConfigError("unknown experiment '" + name + "' (see `picardlab list`)");
}

json config_echo(const ExperimentConfig& c, unsigned keys) {
  json j;
  j["experiment"] = c.experiment;
  if (keys & kAlpha) j["alpha"] = *c.alpha;
  if (keys & kT) j["t"] = *c.t;
  if (keys & kS) j["s"] = *c.s;
  if (keys & kBeta) j["beta"] = *c.beta;
  j["N_list"] = c.N_list;
  if (keys & kSamples) j["samples"] = *c.samples;
  if (keys & kSeed) j["seed"] = *c.seed;
  if (keys & kDelta) j["delta"] = *c.delta;
  if (keys & kN2) j["n2_max"] = *c.n2_max;
  return j;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& s : registry()) v.push_back(s.info);
    return v;
  }();
  return infos;
}

ExperimentConfig resolve_config(const ExperimentConfig& in) {
  if (in.experiment.empty()) throw ConfigError("config: experiment is not set");
  const Entry& entry = find_entry(in.experiment);
  ExperimentConfig c = in;
  const auto& d = entry.defaults;
  auto fill = [](auto& field, const auto& def) {
    if (!field) field = def;
  };
  fill(c.alpha, d.alpha);
  fill(c.t, d.t);
  fill(c.s, d.s);
  fill(c.beta, d.beta);
  fill(c.delta, d.delta);
  fill(c.samples, d.samples);
  fill(c.seed, d.seed);
  fill(c.n2_max, d.n2_max);
  if (c.N_list.empty()) c.N_list = d.N_list;

  const std::string& name = c.experiment;
  auto fail = [&](const std::string& msg) { throw ConfigError(name + ": " + msg); };
  const unsigned k = entry.keys;

  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    if (c.N_list[i] < 1) fail("N_list entries must be >= 1");
    if (i > 0 && c.N_list[i] <= c.N_list[i - 1]) fail("N_list must be strictly increasing");
  }
  if (k & kAlpha) {
    if (!std::isfinite(*c.alpha)) fail("alpha must be finite");
    if (name == "sphere-divergence" && !(*c.alpha > 0.5)) {
      fail("alpha = " + fmt(*c.alpha) + " is outside the divergence regime, which requires t >= 0 and alpha > 1/2");
    }
    if (!(*c.alpha > 0.0)) fail("alpha must be positive");
  }
  if (k & kT) {
    if (!std::isfinite(*c.t) || *c.t < 0.0) fail("t must be finite and >= 0");
  }
  if ((k & kS) && !std::isfinite(*c.s)) fail("s must be finite");
  if ((k & kBeta) && !(*c.beta > 0.0 && std::isfinite(*c.beta))) fail("beta must be positive");
  if (k & kDelta) {
    if (name == "lattice-count" && !(*c.delta >= 0.0 && *c.delta < 0.25)) fail("delta must lie in [0, 1/4)");
    if (name == "concentration" && !(*c.delta > 0.0 && *c.delta < 0.5)) fail("delta must lie in (0, 1/2)");
  }
  if (k & kSamples) {
    const std::int64_t lo = name == "moments" ? 100 : (name == "small-n-oracle" || name == "weyl-check" ? 1 : 2);
    if (*c.samples < lo) fail("samples must be >= " + std::to_string(lo));
  }
  if ((k & kN2) && *c.n2_max < -1) fail("n2_max must be >= 0, or -1 / full");

  const bool fitted = name == "sphere-divergence" || name == "diagnostic" || name == "concentration" || name == "l4-growth";
  if (fitted && c.N_list.size() < 3) fail("a log fit needs at least three N values");
  if (name == "torus-bounded" && c.N_list.back() > TorusOptions{}.desk_bound) {
    fail("N above the desk bound " + std::to_string(TorusOptions{}.desk_bound));
  }
  if ((name == "orthogonality" || name == "small-n-oracle") &&
      harmonics::cluster_cutoff(c.N_list.back()) > PicardOptions{}.brute_force_cutoff) {
    fail("cutoff above the brute-force bound " + std::to_string(PicardOptions{}.brute_force_cutoff));
  }
  if (name == "orthogonality" && c.N_list.size() != 1) fail("N_list must hold a single N");
  if (name == "concentration") {
    for (int n : c.N_list)
      if (concentration::window_edge(n, BandSpec(*c.delta)) > n) fail("empty concentration window at n = " + std::to_string(n));
  }
  if (name == "diagnostic" && c.N_list.front() < 2) fail("N_list must start at 2 or above");
  return c;
}

ExperimentRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const ExperimentConfig c = resolve_config(config);
  const Entry& entry = find_entry(c.experiment);
  ExperimentRecord r;
  r.experiment = c.experiment;
  r.config = config_echo(c, entry.keys);
  r.version = PICARDLAB_VERSION;
  const auto start = std::chrono::steady_clock::now();
  RunOptions o = options;
  o.threads = std::max(1, o.threads);
  entry.run(c, o, r);
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace picardlab
