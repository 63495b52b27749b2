#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace picardlab {

/// Invalid configuration text or parameter outside an experiment's domain.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat key = value configuration. Unset optionals take the experiment's defaults.
struct ExperimentConfig {
  std::string experiment;
  std::optional<double> alpha, t, s, beta, delta;
  std::vector<int> N_list;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> n2_max;  // -1 keeps every n2
  std::string output_path;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// v = intercept + slope ln N by ordinary least squares.
struct FitResult {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 1.0;
  double slope_std_error = 0.0;
};

struct SeriesPoint {
  double N = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

/// Requires at least three distinct N.
FitResult fit_log_growth(const std::vector<SeriesPoint>& points);

struct GateResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentRecord {
  std::string experiment;
  nlohmann::ordered_json config;  // resolved parameters actually used
  std::vector<SeriesPoint> series;
  std::optional<FitResult> fit;
  std::string fit_model;          // "value ~ ln N" or "ln value ~ ln N"
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<GateResult> gates;
  double wall_clock_seconds = 0.0;
  std::string version;

  bool passed() const;
};

/// Record as JSON; the "run" block (wall clock, version) is left out when
/// include_run is false, which is the form compared for determinism.
nlohmann::ordered_json record_to_json(const ExperimentRecord& record, bool include_run = true);
ExperimentRecord record_from_json(const nlohmann::ordered_json& j);

/// Writes record.json and series.csv into `dir`, creating it if needed.
void write_outputs(const ExperimentRecord& record, const std::filesystem::path& dir);
std::string series_csv(const ExperimentRecord& record);

struct RunOptions {
  int threads = 1;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
};

const std::vector<ExperimentInfo>& experiments();

/// Resolved copy of the config: defaults filled and every value checked.
ExperimentConfig resolve_config(const ExperimentConfig& config);

ExperimentRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// PICARDLAB_THREADS, or 1 when unset or malformed.
int threads_from_env();

}  // namespace picardlab
