#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixproc/ingest.hpp"
#include "fixproc/pipeline.hpp"
#include "fixproc/synthetic.hpp"

using namespace fixproc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fixproc_test_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Small two-group dataset: 3 subjects per group, 20 s trials.
fs::path tiny_dataset() {
  static const fs::path path = [] {
    const auto dir = scratch("data");
    SyntheticParams params;
    params.trial_length_ms = 20000.0;
    params.nx = params.ny = 32;
    Dataset d;
    d.trial_length_ms = params.trial_length_ms;
    for (Group g : {Group::novice, Group::non_novice}) {
      const auto m = synthetic_model(reference_hotspots(g, 150.0), g, params);
      for (auto& s : simulate_subjects(m, 3, 77, std::string(to_string(g)))) {
        s.group = g;
        d.sequences.push_back(std::move(s));
      }
    }
    const auto file = dir / "tiny.csv";
    write_fixations(file, d);
    return file;
  }();
  return path;
}

PipelineConfig tiny_config(const std::string& out) {
  PipelineConfig c;
  c.inputs = {tiny_dataset().string()};
  c.trial_length_ms = 20000.0;
  c.output_dir = scratch(out).string();
  c.bandwidth = 30.0;
  c.nx = c.ny = 32;
  c.permutations = 99;
  c.simulations = 25;
  c.envelope_points = 41;
  c.n_angles = 90;
  c.raster_px = 4.0;
  c.seed = 7;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FIXPROC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config JSON round trip and hash") {
  auto c = tiny_config("cfg");
  const auto j = config_to_json(c);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  auto d = c;
  d.seed = 8;
  CHECK(config_hash(d) != config_hash(c));
  d = c;
  d.output_dir = "elsewhere";
  CHECK(config_hash(d) == config_hash(c));
  CHECK(config_from_json(json{{"meta", {{"config", j}}}}).seed == c.seed);
  CHECK_THROWS_AS(config_from_json(json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"nx", "many"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"group", "experts"}}), ConfigError);
  const auto w = config_from_json(json{{"window", {0, 0, 100, 50}}});
  CHECK(w.window.width() == 100.0);
}

TEST_CASE("config validation") {
  auto c = tiny_config("validate");
  CHECK_NOTHROW(validate_config(c));
  c.permutations = 0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = tiny_config("validate");
  c.bandwidth = -1.0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = tiny_config("validate");
  c.shift_mode = "sideways";
  CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("stochastic commands require a seed") {
  auto c = tiny_config("noseed");
  c.seed.reset();
  for (const char* cmd : {"compare-intensity", "simulate", "envelope", "report"}) {
    CHECK_THROWS_AS(run_command(cmd, c), ConfigError);
  }
  CHECK_NOTHROW(run_command("quadrat", c));
  CHECK_THROWS_AS(run_command("dance", c), ConfigError);
}

TEST_CASE("missing input is a data error") {
  auto c = tiny_config("missing");
  c.inputs = {"/nonexistent/fixations.csv"};
  try {
    run_command("ingest", c);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(exit_code_for(e) == 3);
    CHECK(error_json(e)["error"]["kind"] == "data_error");
  }
}

TEST_CASE("ingest writes fixations, saccades and a report") {
  auto c = tiny_config("ingest");
  const auto j = run_command("ingest", c);
  CHECK(j["sequences"] == 6);
  CHECK(fs::exists(fs::path(c.output_dir) / "fixations.csv"));
  CHECK(fs::exists(fs::path(c.output_dir) / "saccades.csv"));
  const auto report = json::parse(slurp(fs::path(c.output_dir) / "ingest_report.json"));
  CHECK(report["meta"]["command"] == "ingest");
  CHECK(report["reports"].size() == 6);
}

TEST_CASE("compare-intensity p-value has the Monte Carlo form") {
  auto c = tiny_config("compare");
  const auto j = run_command("compare-intensity", c);
  const auto k = j["test"]["k"].get<std::size_t>();
  CHECK(j["test"]["m"] == 99);
  CHECK(j["test"]["p"].get<double>() == doctest::Approx((k + 1) / 100.0));
  CHECK(j["meta"]["seed"] == 7);
  CHECK(j["meta"]["config_hash"] == config_hash(c));
}

TEST_CASE("simulate is deterministic and its output is valid input") {
  auto a = tiny_config("sim_a");
  auto b = tiny_config("sim_b");
  run_command("simulate", a);
  run_command("simulate", b);
  for (const char* f : {"simulated_novice.csv", "simulated_non_novice.csv", "provenance_novice.json",
                        "model_non_novice.json"}) {
    CHECK(slurp(fs::path(a.output_dir) / f) == slurp(fs::path(b.output_dir) / f));
  }
  auto again = tiny_config("sim_ingest");
  again.inputs = {(fs::path(a.output_dir) / "simulated_novice.csv").string()};
  const auto j = run_command("ingest", again);
  CHECK(j["sequences"] == 25);
}

TEST_CASE("rerunning from recorded metadata reproduces outputs") {
  auto c = tiny_config("meta_a");
  run_command("simulate", c);
  const auto meta = json::parse(slurp(fs::path(c.output_dir) / "model_novice.json"));
  auto replay = config_from_json(meta);
  replay.output_dir = scratch("meta_b").string();
  run_command("simulate", replay);
  CHECK(slurp(fs::path(c.output_dir) / "simulated_novice.csv") ==
        slurp(fs::path(replay.output_dir) / "simulated_novice.csv"));
}

TEST_CASE("remaining commands produce their artifacts") {
  auto c = tiny_config("all");
  const fs::path out(c.output_dir);
  run_command("intensity", c);
  CHECK(fs::exists(out / "intensity.svg"));
  c.interval_ms = 5000.0;
  const auto r = run_command("residuals", c);
  CHECK(r["intervals"] == 4);
  CHECK(fs::exists(out / "residual_3.csv"));
  run_command("quadrat", c);
  run_command("shift", c);
  CHECK(fs::exists(out / "shift.svg"));
  c.shift_mode = "intervals";
  const auto si = run_command("shift", c);
  CHECK(si["comparisons"].size() == 3);
  run_command("fit", c);
  const auto fit = json::parse(slurp(out / "fit.json"));
  CHECK(fit["fits"].contains("saccade_duration_pooled"));
  CHECK(fit["fits"]["novice"]["fixation_duration"]["shape"].get<double>() > 0.0);
  run_command("qq", c);
  CHECK(fs::exists(out / "qq.csv"));
  const auto s = run_command("summaries", c);
  CHECK(s["subjects"] == 6);
  const auto e = run_command("envelope", c);
  CHECK(e["groups"].contains("novice"));
  CHECK(fs::exists(out / "envelopes_novice.svg"));
  CHECK(fs::exists(out / "envelope_novice_convex_hull_coverage.csv"));
}

TEST_CASE("CLI exit codes and flag overrides") {
  const auto data = tiny_dataset().string();
  const auto out = scratch("cli").string();
  CHECK(run_cli("quadrat -i " + data + " -o " + out) == 0);
  CHECK(run_cli("ingest -i /nonexistent.csv -o " + out) == 3);
  CHECK(run_cli("simulate -i " + data + " -o " + out + " --bandwidth 30") == 2);
  CHECK(run_cli("quadrat -i " + data + " -o " + out + " --quadrats 1") == 2);
  CHECK(run_cli("frobnicate") == 2);
  {
    std::ofstream cfg(out + "/cfg.json");
    cfg << json{{"inputs", {data}}, {"trial_length_ms", 20000}, {"quadrats", 3}}.dump();
  }
  CHECK(run_cli("quadrat -c " + out + "/cfg.json -o " + out + " --quadrats 4") == 0);
  const auto q = json::parse(slurp(fs::path(out) / "quadrat.json"));
  CHECK(q["result"]["q"] == 4);
  CHECK(run_cli("quadrat -c " + out + "/cfg.json -o " + out) == 0);
  CHECK(json::parse(slurp(fs::path(out) / "quadrat.json"))["result"]["q"] == 3);
}
