#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "picardlab/harness.hpp"

using namespace picardlab;

namespace {

constexpr int kValidationError = 2;
constexpr int kGateFailure = 3;

int list_experiments() {
  for (const auto& e : experiments()) std::printf("%-18s %s\n", e.name.c_str(), e.summary.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"picardlab: numerical experiments on the first Picard iterate"};
  app.set_version_flag("--version", std::string(PICARDLAB_VERSION));

  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
  bool check = false;
  bool quiet = false;

  app.add_option("experiment", experiment, "experiment name, or `list`")->required();
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", threads, "worker threads (overrides PICARDLAB_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory (overrides output_path)");
  app.add_flag("--check", check, "exit 3 when any acceptance gate fails");
  app.add_flag("-q,--quiet", quiet, "only print the gate summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationError;
  }

  if (experiment == "list") return list_experiments();

  try {
    if (config_path.empty()) throw ConfigError("--config is required");
    ExperimentConfig cfg = load_config(config_path);
    if (!cfg.experiment.empty() && cfg.experiment != experiment) {
      throw ConfigError("config names experiment '" + cfg.experiment + "' but '" + experiment + "' was requested");
    }
    cfg.experiment = experiment;
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_path = out_dir;
    if (cfg.output_path.empty()) cfg.output_path = experiment;
    cfg = resolve_config(cfg);

    RunOptions opts;
    opts.threads = threads ? *threads : threads_from_env();
    const ExperimentRecord record = run_experiment(cfg, opts);
    write_outputs(record, cfg.output_path);

    if (!quiet) {
      for (const auto& p : record.series) std::printf("N=%-6g value=%.10g stderr=%.3g\n", p.N, p.value, p.std_error);
      if (record.fit) {
        std::printf("fit [%s]: intercept=%.6g slope=%.6g R^2=%.6f\n", record.fit_model.c_str(), record.fit->intercept,
                    record.fit->slope, record.fit->r_squared);
      }
    }
    for (const auto& g : record.gates) std::printf("%s  %s: %s\n", g.passed ? "PASS" : "FAIL", g.name.c_str(), g.detail.c_str());
    std::printf("wrote %s/record.json (%.2f s)\n", cfg.output_path.c_str(), record.wall_clock_seconds);
    if (check && !record.passed()) return kGateFailure;
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "picardlab: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "picardlab: " << e.what() << "\n";
    return 1;
  }
}
