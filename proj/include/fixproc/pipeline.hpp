#pragma once

// Command orchestration behind the `fixproc` CLI. Every command reads the
// canonical fixation CSV inputs named in the config, writes its artifacts to
// the output directory and returns a JSON summary. Outputs depend only on
// (inputs, config); stochastic commands require a seed and record it together
// with a hash of the full config.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fixproc/core.hpp"
#include "fixproc/json_io.hpp"

namespace fixproc {

struct PipelineConfig {
  std::vector<std::string> inputs;
  Window window = Window::reference();
  double trial_length_ms = 180000.0;
  double min_duration_ms = 40.0;
  std::optional<double> bandwidth;
  std::optional<double> h1;
  std::optional<double> h2;
  std::vector<double> h_candidates = default_bandwidth_candidates();
  double interval_ms = 30000.0;
  std::size_t permutations = 10000;
  std::optional<std::uint64_t> seed;
  std::size_t simulations = 200;
  double ball_radius = 35.0;
  double raster_px = 1.0;
  double p_long = 0.2;
  int nx = 128;
  int ny = 128;
  int n_angles = 720;
  int quadrats = 5;
  double alpha = 0.05;
  std::size_t envelope_points = 361;
  std::size_t acf_max_lag = 10;
  std::optional<Group> group;
  std::string shift_mode = "groups";  // or "intervals"
  bool first_from_all = false;
  std::string output_dir = "out";
};

/// Accepts a config object, or any output metadata object carrying
/// {"meta": {"config": ...}}. Unknown keys are a ConfigError.
PipelineConfig config_from_json(const json& j);
json config_to_json(const PipelineConfig& c);

/// Config as recorded in output metadata: everything except output_dir, so
/// outputs do not depend on where they are written.
json config_meta_json(const PipelineConfig& c);

/// 16 hex digits of FNV-1a over config_meta_json.
std::string config_hash(const PipelineConfig& c);

/// Validates numeric fields; throws ConfigError.
void validate_config(const PipelineConfig& c);

const std::vector<std::string>& command_names();

/// Runs one command. Throws ConfigError / DataError / NumericError.
json run_command(const std::string& command, const PipelineConfig& config);

/// Exit code for an exception: 2 config, 3 data, 4 numeric, 1 otherwise.
int exit_code_for(const std::exception& e);

/// Machine-readable error document.
json error_json(const std::exception& e);

}  // namespace fixproc
