// fixproc: command-line front end for the fixation-process pipeline.
//
//   fixproc <command> [--config cfg.json] [--input a.csv ...] [--out dir] [--seed N] ...
//
// Flags override values from the config file. The command summary is written
// to stdout as JSON; failures print an error document to stderr and exit with
// 2 (config), 3 (data) or 4 (numeric).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixproc/pipeline.hpp"

namespace {

using fixproc::json;

struct Overrides {
  std::string config_path;
  std::vector<std::string> inputs;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> bandwidth, h1, h2, interval_ms, radius, raster, p_long, alpha;
  std::optional<double> trial_length_ms, min_duration_ms;
  std::optional<std::size_t> permutations, simulations, envelope_points, acf_max_lag;
  std::optional<int> nx, ny, n_angles, quadrats;
  std::vector<double> window;
  std::vector<double> h_candidates;
  std::optional<std::string> group, shift_mode;
  bool first_from_all = false;
  bool print_config = false;
};

void add_options(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config_path, "JSON config file (or any output carrying meta.config)");
  app.add_option("-i,--input", o.inputs, "Fixation CSV input(s)");
  app.add_option("-o,--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "64-bit seed for stochastic commands");
  app.add_option("--bandwidth,-b", o.bandwidth, "Kernel bandwidth h (px); CV when unset");
  app.add_option("--h1", o.h1, "Bandwidth for the novice group");
  app.add_option("--h2", o.h2, "Bandwidth for the non_novice group");
  app.add_option("--h-candidates", o.h_candidates, "Bandwidth candidates for CV");
  app.add_option("--interval-ms", o.interval_ms, "Interval length for residuals and shift intervals");
  app.add_option("--permutations,-m", o.permutations, "Permutations for compare-intensity");
  app.add_option("--simulations", o.simulations, "Simulated runs");
  app.add_option("--radius", o.radius, "Ball radius R (px)");
  app.add_option("--raster", o.raster, "Raster cell for ball-union coverage (px)");
  app.add_option("--p-long", o.p_long, "Long-jump probability");
  app.add_option("--nx", o.nx, "Grid columns");
  app.add_option("--ny", o.ny, "Grid rows");
  app.add_option("--n-angles", o.n_angles, "Candidate directions per jump");
  app.add_option("--quadrats", o.quadrats, "Quadrats per axis");
  app.add_option("--alpha", o.alpha, "Significance level");
  app.add_option("--envelope-points", o.envelope_points, "Time grid size for envelopes");
  app.add_option("--acf-max-lag", o.acf_max_lag, "Maximum ACF lag");
  app.add_option("--window", o.window, "Window x_min y_min x_max y_max")->expected(4);
  app.add_option("--trial-length-ms", o.trial_length_ms, "Trial length (ms)");
  app.add_option("--min-duration-ms", o.min_duration_ms, "Minimum fixation duration (ms)");
  app.add_option("--group", o.group, "novice, non_novice or all");
  app.add_option("--shift-mode", o.shift_mode, "groups or intervals");
  app.add_flag("--first-from-all", o.first_from_all, "Draw first fixations from the all-fixation surface");
  app.add_flag("--print-config", o.print_config, "Print the resolved config and exit");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fixproc::ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw fixproc::ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

fixproc::PipelineConfig resolve(const Overrides& o) {
  json j = o.config_path.empty() ? json::object() : load_config_file(o.config_path);
  if (j.contains("meta") && j["meta"].contains("config")) j = j["meta"]["config"];
  auto set = [&j](const char* key, const auto& value) {
    if (value) j[key] = *value;
  };
  if (!o.inputs.empty()) j["inputs"] = o.inputs;
  set("output_dir", o.out);
  set("seed", o.seed);
  set("bandwidth", o.bandwidth);
  set("h1", o.h1);
  set("h2", o.h2);
  if (!o.h_candidates.empty()) j["h_candidates"] = o.h_candidates;
  set("interval_ms", o.interval_ms);
  set("permutations", o.permutations);
  set("simulations", o.simulations);
  set("ball_radius", o.radius);
  set("raster_px", o.raster);
  set("p_long", o.p_long);
  set("nx", o.nx);
  set("ny", o.ny);
  set("n_angles", o.n_angles);
  set("quadrats", o.quadrats);
  set("alpha", o.alpha);
  set("envelope_points", o.envelope_points);
  set("acf_max_lag", o.acf_max_lag);
  if (!o.window.empty()) j["window"] = o.window;
  set("trial_length_ms", o.trial_length_ms);
  set("min_duration_ms", o.min_duration_ms);
  set("group", o.group);
  set("shift_mode", o.shift_mode);
  if (o.first_from_all) j["first_from_all"] = true;
  return fixproc::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixation-process analysis pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  add_options(app, o);
  for (const auto& name : fixproc::command_names()) app.add_subcommand(name, "Run the " + name + " step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"kind", "config_error"}, {"code", 2}, {"message", e.what()}}}}.dump()
              << '\n';
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto config = resolve(o);
    if (o.print_config) {
      std::cout << fixproc::config_to_json(config).dump(2) << '\n';
      return 0;
    }
    const auto summary = fixproc::run_command(command, config);
    std::cout << summary.dump(2) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << fixproc::error_json(e).dump() << '\n';
    return fixproc::exit_code_for(e);
  }
}
