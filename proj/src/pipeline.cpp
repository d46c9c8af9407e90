#include "fixproc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fixproc/compare.hpp"
#include "fixproc/csv.hpp"
#include "fixproc/density.hpp"
#include "fixproc/envelopes.hpp"
#include "fixproc/fitdist.hpp"
#include "fixproc/ingest.hpp"
#include "fixproc/random.hpp"
#include "fixproc/simulate.hpp"
#include "fixproc/summaries.hpp"
#include "fixproc/svg.hpp"

namespace fs = std::filesystem;

namespace fixproc {

// ---------------------------------------------------------------------------
// Config

namespace {

template <class T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& target) {
  if (j.contains(key)) {
    if (j.at(key).is_null()) {
      target.reset();
    } else {
      target = j.at(key).get<T>();
    }
  }
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "inputs",        "window",          "trial_length_ms", "min_duration_ms", "bandwidth",
      "h1",            "h2",              "h_candidates",    "interval_ms",     "permutations",
      "seed",          "simulations",     "ball_radius",     "raster_px",       "p_long",
      "nx",            "ny",              "n_angles",        "quadrats",        "alpha",
      "envelope_points", "acf_max_lag",   "group",           "shift_mode",      "first_from_all",
      "output_dir"};
  return keys;
}

}  // namespace

PipelineConfig config_from_json(const json& input) {
  const json* src = &input;
  if (input.contains("meta") && input.at("meta").contains("config")) src = &input.at("meta").at("config");
  const json& j = *src;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  PipelineConfig c;
  try {
    if (j.contains("inputs")) {
      if (j.at("inputs").is_string()) {
        c.inputs = {j.at("inputs").get<std::string>()};
      } else {
        c.inputs = j.at("inputs").get<std::vector<std::string>>();
      }
    }
    if (j.contains("window")) from_json(j.at("window"), c.window);
    read(j, "trial_length_ms", c.trial_length_ms);
    read(j, "min_duration_ms", c.min_duration_ms);
    read_optional(j, "bandwidth", c.bandwidth);
    read_optional(j, "h1", c.h1);
    read_optional(j, "h2", c.h2);
    read(j, "h_candidates", c.h_candidates);
    read(j, "interval_ms", c.interval_ms);
    read(j, "permutations", c.permutations);
    read_optional(j, "seed", c.seed);
    read(j, "simulations", c.simulations);
    read(j, "ball_radius", c.ball_radius);
    read(j, "raster_px", c.raster_px);
    read(j, "p_long", c.p_long);
    read(j, "nx", c.nx);
    read(j, "ny", c.ny);
    read(j, "n_angles", c.n_angles);
    read(j, "quadrats", c.quadrats);
    read(j, "alpha", c.alpha);
    read(j, "envelope_points", c.envelope_points);
    read(j, "acf_max_lag", c.acf_max_lag);
    if (j.contains("group") && !j.at("group").is_null()) {
      const auto g = j.at("group").get<std::string>();
      if (g != "all") c.group = parse_group(g);
    }
    read(j, "shift_mode", c.shift_mode);
    read(j, "first_from_all", c.first_from_all);
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json config_to_json(const PipelineConfig& c) {
  return {{"inputs", c.inputs},
          {"window", c.window},
          {"trial_length_ms", c.trial_length_ms},
          {"min_duration_ms", c.min_duration_ms},
          {"bandwidth", optional_json(c.bandwidth)},
          {"h1", optional_json(c.h1)},
          {"h2", optional_json(c.h2)},
          {"h_candidates", c.h_candidates},
          {"interval_ms", c.interval_ms},
          {"permutations", c.permutations},
          {"seed", optional_json(c.seed)},
          {"simulations", c.simulations},
          {"ball_radius", c.ball_radius},
          {"raster_px", c.raster_px},
          {"p_long", c.p_long},
          {"nx", c.nx},
          {"ny", c.ny},
          {"n_angles", c.n_angles},
          {"quadrats", c.quadrats},
          {"alpha", c.alpha},
          {"envelope_points", c.envelope_points},
          {"acf_max_lag", c.acf_max_lag},
          {"group", c.group ? json(std::string(to_string(*c.group))) : json(nullptr)},
          {"shift_mode", c.shift_mode},
          {"first_from_all", c.first_from_all},
          {"output_dir", c.output_dir}};
}

json config_meta_json(const PipelineConfig& c) {
  auto j = config_to_json(c);
  j.erase("output_dir");
  return j;
}

std::string config_hash(const PipelineConfig& c) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_meta_json(c).dump())));
  return buf;
}

void validate_config(const PipelineConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(c.trial_length_ms, "trial_length_ms");
  if (!(c.min_duration_ms >= 0.0)) throw ConfigError("min_duration_ms must be >= 0");
  if (c.bandwidth) positive(*c.bandwidth, "bandwidth");
  if (c.h1) positive(*c.h1, "h1");
  if (c.h2) positive(*c.h2, "h2");
  if (c.h_candidates.empty()) throw ConfigError("h_candidates must not be empty");
  for (double h : c.h_candidates) positive(h, "h_candidates entries");
  positive(c.interval_ms, "interval_ms");
  if (c.permutations == 0) throw ConfigError("permutations must be positive");
  if (c.simulations == 0) throw ConfigError("simulations must be positive");
  positive(c.ball_radius, "ball_radius");
  positive(c.raster_px, "raster_px");
  if (!(c.p_long >= 0.0 && c.p_long <= 1.0)) throw ConfigError("p_long must lie in [0, 1]");
  if (c.nx < 1 || c.ny < 1) throw ConfigError("nx and ny must be positive");
  if (c.n_angles < 1) throw ConfigError("n_angles must be positive");
  if (c.quadrats < 2) throw ConfigError("quadrats must be at least 2");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (c.envelope_points < 2) throw ConfigError("envelope_points must be at least 2");
  if (c.shift_mode != "groups" && c.shift_mode != "intervals") {
    throw ConfigError("shift_mode must be 'groups' or 'intervals'");
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "ingest", "intensity", "residuals", "quadrat",  "shift",    "compare-intensity",
      "fit",    "qq",        "simulate",  "summaries", "envelope", "report"};
  return names;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const NumericError*>(&e)) return 4;
  return 1;
}

json error_json(const std::exception& e) {
  std::string kind = "internal_error";
  if (dynamic_cast<const ConfigError*>(&e)) kind = "config_error";
  else if (dynamic_cast<const DataError*>(&e)) kind = "data_error";
  else if (dynamic_cast<const NumericError*>(&e)) kind = "numeric_error";
  return {{"error", {{"kind", kind}, {"code", exit_code_for(e)}, {"message", e.what()}}}};
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Context {
  const PipelineConfig& config;
  std::string command;
  fs::path out;
  Dataset raw;
  PreparedData data;
  std::size_t rows = 0;
  std::vector<std::string> reordered;

  json meta() const {
    return {{"command", command},
            {"seed", optional_json(config.seed)},
            {"config_hash", config_hash(config)},
            {"config", config_meta_json(config)}};
  }

  std::uint64_t seed() const {
    if (!config.seed) throw ConfigError("command '" + command + "' is stochastic and needs a seed");
    return *config.seed;
  }

  std::vector<Group> groups() const {
    std::vector<Group> out_groups;
    for (Group g : {Group::novice, Group::non_novice}) {
      if (config.group && *config.group != g) continue;
      if (!data.dataset.group(g).empty()) out_groups.push_back(g);
    }
    return out_groups;
  }

  std::vector<Point> points(std::optional<Group> g) const {
    std::vector<Point> out_points;
    for (const auto& s : data.dataset.sequences) {
      if (g && s.group != *g) continue;
      for (const auto& f : s.fixations) out_points.push_back(f.location);
    }
    return out_points;
  }

  std::vector<double> durations(std::optional<Group> g) const {
    std::vector<double> out_d;
    for (const auto& s : data.dataset.sequences) {
      if (g && s.group != *g) continue;
      for (const auto& f : s.fixations) out_d.push_back(f.duration_ms);
    }
    return out_d;
  }

  double bandwidth_for(std::span<const Point> pts, std::optional<double> override_h) const {
    if (override_h) return *override_h;
    if (config.bandwidth) return *config.bandwidth;
    return select_bandwidth_cv(pts, data.dataset.window, config.h_candidates, config.nx, config.ny);
  }

  ModelConfig model_config(std::span<const Point> group_points) const {
    ModelConfig mc;
    mc.bandwidth = bandwidth_for(group_points, std::nullopt);
    mc.h_candidates = config.h_candidates;
    mc.nx = config.nx;
    mc.ny = config.ny;
    mc.p_long = config.p_long;
    mc.n_angles = config.n_angles;
    mc.min_fixation_ms = config.min_duration_ms;
    mc.first_from_all = config.first_from_all;
    return mc;
  }
};

Context load(const std::string& command, const PipelineConfig& c) {
  validate_config(c);
  if (c.inputs.empty()) throw ConfigError("no input files given");
  Context ctx{c, command, fs::path(c.output_dir), {}, {}, 0, {}};
  ctx.raw.window = c.window;
  ctx.raw.trial_length_ms = c.trial_length_ms;
  for (const auto& path : c.inputs) {
    if (!fs::exists(path)) throw DataError("input file not found: " + path);
    auto parsed = parse_fixations(fs::path(path), c.window, c.trial_length_ms);
    ctx.rows += parsed.row_count;
    for (auto& s : parsed.dataset.sequences) ctx.raw.sequences.push_back(std::move(s));
    for (auto& r : parsed.reordered) ctx.reordered.push_back(std::move(r));
  }
  ctx.data = prepare(ctx.raw, c.min_duration_ms);
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw DataError("cannot create output directory " + ctx.out.string());
  return ctx;
}

std::string stream_text(auto&& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

std::string group_tag(Group g) { return std::string(to_string(g)); }

// --- ingest ---------------------------------------------------------------

json cmd_ingest(Context& ctx) {
  write_text(ctx.out / "fixations.csv",
             stream_text([&](std::ostream& s) { write_fixations(s, ctx.data.dataset); }));
  std::ostringstream sac;
  sac << "subject_id,painting_id,from_index,to_index,length_px,duration_ms,valid\n";
  for (std::size_t i = 0; i < ctx.raw.sequences.size(); ++i) {
    for (const auto& s : ctx.data.saccades[i]) {
      sac << ctx.raw.sequences[i].subject_id << ',' << ctx.raw.sequences[i].painting_id << ','
          << s.from_index << ',' << s.to_index << ',' << csv::format_number(s.length_px) << ','
          << csv::format_number(s.duration_ms) << ',' << (s.valid ? 1 : 0) << '\n';
    }
  }
  write_text(ctx.out / "saccades.csv", sac.str());

  std::size_t kept = ctx.data.dataset.fixation_count();
  json j = {{"meta", ctx.meta()},
            {"rows", ctx.rows},
            {"retained", kept},
            {"sequences", ctx.data.dataset.sequences.size()},
            {"reordered", ctx.reordered},
            {"reports", ctx.data.reports}};
  write_json(ctx.out / "ingest_report.json", j);
  return j;
}

// --- intensity -------------------------------------------------------------

json cmd_intensity(Context& ctx) {
  const auto pts = ctx.points(ctx.config.group);
  if (pts.empty()) throw DataError("no fixations to estimate an intensity from");
  const double h = ctx.bandwidth_for(pts, std::nullopt);
  const auto grid =
      estimate_intensity(pts, ctx.data.dataset.window, h, ctx.config.nx, ctx.config.ny);
  write_text(ctx.out / "intensity.csv", stream_text([&](std::ostream& s) {
               write_grid_csv(s, grid.geometry, grid.values);
             }));
  write_text(ctx.out / "intensity.svg",
             svg::heatmap(grid.geometry, grid.values, "Intensity, h = " + csv::format_number(h)));
  json j = {{"meta", ctx.meta()}, {"points", pts.size()}, {"grid", grid_json(grid)}};
  write_json(ctx.out / "intensity.json", j);
  j.erase("grid");
  j["bandwidth"] = h;
  return j;
}

// --- residuals -------------------------------------------------------------

json cmd_residuals(Context& ctx) {
  const auto pts = ctx.points(std::nullopt);
  if (pts.empty()) throw DataError("no fixations");
  const double h = ctx.bandwidth_for(pts, std::nullopt);
  const auto res = residual_intensities(ctx.data.dataset, ctx.config.interval_ms, h, ctx.config.nx,
                                        ctx.config.ny);
  json grids = json::array();
  for (std::size_t k = 0; k < res.residuals.size(); ++k) {
    const auto& r = res.residuals[k];
    const auto name = "residual_" + std::to_string(k);
    write_text(ctx.out / (name + ".csv"),
               stream_text([&](std::ostream& s) { write_grid_csv(s, r.geometry, r.values); }));
    const double t0 = static_cast<double>(k) * ctx.config.interval_ms;
    const double t1 = std::min(t0 + ctx.config.interval_ms, ctx.data.dataset.trial_length_ms);
    write_text(ctx.out / (name + ".svg"),
               svg::heatmap(r.geometry, r.values,
                            "Residual intensity " + csv::format_number(t0 / 1000.0) + "-" +
                                csv::format_number(t1 / 1000.0) + " s",
                            true));
    grids.push_back({{"start_ms", t0}, {"end_ms", t1}, {"residual", grid_json(r)}});
  }
  json j = {{"meta", ctx.meta()}, {"bandwidth", h}, {"warnings", res.warnings}, {"intervals", grids}};
  write_json(ctx.out / "residuals.json", j);
  return {{"meta", ctx.meta()}, {"bandwidth", h}, {"intervals", res.residuals.size()},
          {"warnings", res.warnings}};
}

// --- quadrat ---------------------------------------------------------------

json cmd_quadrat(Context& ctx) {
  const auto pts = ctx.points(ctx.config.group);
  const auto r = quadrat_chisq(pts, ctx.data.dataset.window, ctx.config.quadrats);
  json j = {{"meta", ctx.meta()}, {"result", r}};
  write_json(ctx.out / "quadrat.json", j);
  return j;
}

// --- shift -----------------------------------------------------------------

svg::Panel shift_panel(const ShiftCurve& s, const std::string& title) {
  svg::Panel p{title, "x (ms)", "shift (ms)", {}};
  p.series.push_back({s.abscissae, s.lower, "#999999", 1.0, false, true});
  p.series.push_back({s.abscissae, s.upper, "#999999", 1.0, false, true});
  p.series.push_back({s.abscissae, s.delta, "#000000", 1.2, false, true});
  p.series.push_back({{s.abscissae.front(), s.abscissae.back()}, {0.0, 0.0}, "#cc0000", 1.0, false, false});
  return p;
}

json shift_comparisons(const Context& ctx, std::vector<svg::Panel>& panels) {
  json list = json::array();
  if (ctx.config.shift_mode == "groups") {
    const auto x = ctx.durations(Group::novice);
    const auto y = ctx.durations(Group::non_novice);
    const auto s = shift_function(x, y, ctx.config.alpha);
    list.push_back({{"x", "novice"}, {"y", "non_novice"}, {"curve", s}});
    panels.push_back(shift_panel(s, "non_novice vs novice fixation durations"));
    return list;
  }
  // Interval k against the first interval, pooled over the selected subjects.
  const double step = ctx.config.interval_ms;
  const auto k_count =
      static_cast<std::size_t>(std::ceil(ctx.data.dataset.trial_length_ms / step - 1e-9));
  std::vector<std::vector<double>> by_interval(k_count);
  for (const auto& s : ctx.data.dataset.sequences) {
    if (ctx.config.group && s.group != *ctx.config.group) continue;
    for (const auto& f : s.fixations) {
      if (f.onset_ms < 0.0 || f.onset_ms >= ctx.data.dataset.trial_length_ms) continue;
      by_interval[std::min(static_cast<std::size_t>(f.onset_ms / step), k_count - 1)].push_back(
          f.duration_ms);
    }
  }
  for (std::size_t k = 1; k < k_count; ++k) {
    const auto s = shift_function(by_interval[0], by_interval[k], ctx.config.alpha);
    list.push_back({{"x", "interval_0"}, {"y", "interval_" + std::to_string(k)}, {"curve", s}});
    panels.push_back(shift_panel(s, "interval " + std::to_string(k) + " vs interval 0"));
  }
  return list;
}

json cmd_shift(Context& ctx) {
  std::vector<svg::Panel> panels;
  json j = {{"meta", ctx.meta()}, {"mode", ctx.config.shift_mode},
            {"comparisons", shift_comparisons(ctx, panels)}};
  write_json(ctx.out / "shift.json", j);
  write_text(ctx.out / "shift.svg", svg::panels(panels, 3));
  json summary = {{"meta", ctx.meta()}, {"mode", ctx.config.shift_mode}, {"comparisons", json::array()}};
  for (const auto& c : j["comparisons"]) {
    summary["comparisons"].push_back(
        {{"x", c["x"]}, {"y", c["y"]}, {"zero_inside", c["curve"]["zero_inside"]}});
  }
  return summary;
}

// --- compare-intensity -----------------------------------------------------

RatioTestResult run_ratio_test(const Context& ctx) {
  const auto p1 = ctx.points(Group::novice);
  const auto p2 = ctx.points(Group::non_novice);
  if (p1.empty() || p2.empty()) throw DataError("both groups need fixations");
  PermutationOptions opt;
  opt.permutations = ctx.config.permutations;
  opt.seed = ctx.seed();
  opt.nx = ctx.config.nx;
  opt.ny = ctx.config.ny;
  opt.h1 = ctx.bandwidth_for(p1, ctx.config.h1);
  opt.h2 = ctx.bandwidth_for(p2, ctx.config.h2);
  return permutation_test(ctx.data.dataset, opt);
}

json cmd_compare(Context& ctx) {
  const auto r = run_ratio_test(ctx);
  write_text(ctx.out / "log_ratio.csv", stream_text([&](std::ostream& s) {
               write_grid_csv(s, r.r_grid.geometry, r.r_grid.values);
             }));
  write_text(ctx.out / "log_ratio.svg",
             svg::heatmap(r.r_grid.geometry, r.r_grid.values, "Log density ratio, novice / non_novice",
                          true));
  json j = {{"meta", ctx.meta()}, {"test", ratio_test_json(r, true)}};
  j["test"]["null_stats"] = r.null_stats;
  write_json(ctx.out / "compare.json", j);
  return {{"meta", ctx.meta()}, {"test", ratio_test_json(r, false)}};
}

// --- fit -------------------------------------------------------------------

json fit_summary(const Context& ctx) {
  json fits = json::object();
  std::vector<double> sac_durations;
  for (std::size_t i = 0; i < ctx.data.saccades.size(); ++i) {
    for (const auto& s : ctx.data.saccades[i]) {
      if (s.valid && s.duration_ms > 0.0) sac_durations.push_back(s.duration_ms);
    }
  }
  fits["saccade_duration_pooled"] = fit_gamma_mle(sac_durations, GammaSource::saccade_duration);
  for (Group g : ctx.groups()) {
    const auto d = ctx.durations(g);
    const auto fd = fit_gamma_mle(d, GammaSource::fixation_duration);
    std::vector<double> lengths;
    for (std::size_t i = 0; i < ctx.data.dataset.sequences.size(); ++i) {
      if (ctx.data.dataset.sequences[i].group != g) continue;
      for (const auto& s : ctx.data.saccades[i]) {
        if (s.valid && s.length_px > 0.0) lengths.push_back(s.length_px);
      }
    }
    json gj = {{"fixation_duration", fd},
               {"fixation_duration_loglik", gamma_log_likelihood(fd, d)},
               {"saccade_length", fit_gamma_mle(lengths, GammaSource::saccade_length)}};
    fits[group_tag(g)] = gj;
  }
  return fits;
}

json cmd_fit(Context& ctx) {
  json acfs = json::array();
  for (const auto& s : ctx.data.dataset.sequences) {
    if (ctx.config.group && s.group != *ctx.config.group) continue;
    const auto d = s.durations();
    if (d.size() <= ctx.config.acf_max_lag + 1) continue;
    try {
      acfs.push_back({{"subject_id", s.subject_id},
                      {"painting_id", s.painting_id},
                      {"acf", acf(d, ctx.config.acf_max_lag)},
                      {"white_noise_bound", 2.0 / std::sqrt(static_cast<double>(d.size()))}});
    } catch (const NumericError&) {
      // Constant duration series carry no autocorrelation information.
    }
  }
  json j = {{"meta", ctx.meta()}, {"fits", fit_summary(ctx)}, {"acf", acfs}};
  write_json(ctx.out / "fit.json", j);
  return j;
}

// --- qq --------------------------------------------------------------------

json cmd_qq(Context& ctx) {
  const auto d = ctx.durations(ctx.config.group);
  const auto fit = fit_gamma_mle(d, GammaSource::fixation_duration);
  const auto q = gamma_qq(d, fit, ctx.config.alpha);
  write_text(ctx.out / "qq.csv", stream_text([&](std::ostream& s) { write_qq_csv(s, q); }));
  svg::Panel p{"Gamma QQ, fixation durations", "theoretical (ms)", "empirical (ms)", {}};
  p.series.push_back({q.theoretical, q.lower, "#999999", 1.0, false, false});
  p.series.push_back({q.theoretical, q.upper, "#999999", 1.0, false, false});
  p.series.push_back({q.theoretical, q.empirical, "#000000", 1.0, false, false});
  p.series.push_back({{q.theoretical.front(), q.theoretical.back()},
                      {q.theoretical.front(), q.theoretical.back()}, "#cc0000", 1.0, false, false});
  write_text(ctx.out / "qq.svg", svg::panels({p}, 1));
  json j = {{"meta", ctx.meta()}, {"fit", fit}, {"n", d.size()}, {"inside", q.inside()},
            {"halfwidth", q.halfwidth}};
  write_json(ctx.out / "qq.json", j);
  return j;
}

// --- simulate --------------------------------------------------------------

std::uint64_t group_seed(std::uint64_t seed, const std::string& purpose, Group g) {
  return Rng::stream(seed, purpose + "/" + group_tag(g)).next_u64();
}

json cmd_simulate(Context& ctx) {
  json out = {{"meta", ctx.meta()}, {"groups", json::object()}};
  const auto seed = ctx.seed();
  for (Group g : ctx.groups()) {
    const auto pts = ctx.points(g);
    const auto model = build_model(ctx.data, g, ctx.model_config(pts));
    const auto runs = simulate_runs(model, group_seed(seed, "simulate", g), ctx.config.simulations);
    const auto tag = group_tag(g);
    write_fixations(ctx.out / ("simulated_" + tag + ".csv"), to_dataset(runs, model));
    write_json(ctx.out / ("provenance_" + tag + ".json"),
               {{"meta", ctx.meta()}, {"runs", provenance_json(runs)}});
    write_json(ctx.out / ("model_" + tag + ".json"), {{"meta", ctx.meta()}, {"model", model_json(model)}});
    std::size_t fixations = 0;
    std::size_t jumps = 0;
    std::size_t long_jumps = 0;
    for (const auto& r : runs) {
      fixations += r.sequence.fixations.size();
      jumps += r.jump_provenance.size();
      long_jumps += static_cast<std::size_t>(
          std::count(r.jump_provenance.begin(), r.jump_provenance.end(), JumpKind::uniform_long));
    }
    out["groups"][tag] = {{"runs", runs.size()},
                          {"fixations", fixations},
                          {"long_jump_fraction",
                           jumps ? static_cast<double>(long_jumps) / static_cast<double>(jumps) : 0.0},
                          {"model", model_json(model)}};
  }
  return out;
}

// --- summaries -------------------------------------------------------------

std::string file_stem(const FixationSequence& s) {
  std::string stem = s.subject_id + "__" + s.painting_id;
  for (char& c : stem) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) c = '_';
  }
  return stem;
}

json cmd_summaries(Context& ctx) {
  const fs::path dir = ctx.out / "summaries";
  fs::create_directories(dir);
  const auto& w = ctx.data.dataset.window;
  const double end = ctx.data.dataset.trial_length_ms;
  json subjects = json::array();
  for (const auto& s : ctx.data.dataset.sequences) {
    if (ctx.config.group && s.group != *ctx.config.group) continue;
    if (s.fixations.empty()) continue;
    const auto hull = convex_hull_coverage(s, w, end);
    const auto ball = ball_union_coverage(s, w, end, ctx.config.ball_radius, ctx.config.raster_px);
    const auto path = scanpath_length(s, end);
    const auto stem = file_stem(s);
    write_text(dir / (stem + "_hull.csv"), stream_text([&](std::ostream& o) { write_curve_csv(o, hull); }));
    write_text(dir / (stem + "_ball.csv"), stream_text([&](std::ostream& o) { write_curve_csv(o, ball); }));
    write_text(dir / (stem + "_scanpath.csv"),
               stream_text([&](std::ostream& o) { write_curve_csv(o, path); }));
    json sj = {{"subject_id", s.subject_id},
               {"painting_id", s.painting_id},
               {"group", to_string(s.group)},
               {"convex_hull_coverage", hull},
               {"ball_union_coverage", ball},
               {"scanpath_length", path}};
    if (s.fixations.size() >= 2) sj["transitions"] = transitions_json(transition_curves(s, w, end));
    subjects.push_back(std::move(sj));
  }
  json j = {{"meta", ctx.meta()}, {"subjects", subjects}};
  write_json(ctx.out / "summaries.json", j);
  return {{"meta", ctx.meta()}, {"subjects", subjects.size()}};
}

// --- envelope --------------------------------------------------------------

struct CurveSet {
  std::vector<double> hull, ball, path;
  std::array<std::array<std::vector<double>, 4>, 4> transitions;
};

CurveSet curve_set(const FixationSequence& s, const Window& w, double end, std::span<const double> grid,
                   const PipelineConfig& c) {
  CurveSet cs;
  cs.hull = resample_curve(convex_hull_coverage(s, w, end), grid);
  cs.ball = resample_curve(ball_union_coverage(s, w, end, c.ball_radius, c.raster_px), grid);
  cs.path = resample_curve(scanpath_length(s, end), grid);
  if (s.fixations.size() >= 2) {
    const auto t = transition_curves(s, w, end);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) cs.transitions[a][b] = resample_curve(t.curves[a][b], grid);
    }
  } else {
    for (auto& row : cs.transitions) {
      for (auto& v : row) v.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    }
  }
  return cs;
}

json envelope_entry(const std::string& name, const std::vector<double>& grid,
                    const std::vector<std::vector<double>>& sims,
                    const std::vector<std::vector<double>>& observed,
                    const std::vector<std::string>& ids, double alpha, svg::Panel& panel) {
  // Start at the first grid time where every simulated curve is defined.
  std::size_t start = 0;
  while (start < grid.size() &&
         std::any_of(sims.begin(), sims.end(), [&](const auto& r) { return std::isnan(r[start]); })) {
    ++start;
  }
  json j = {{"name", name}};
  if (start == grid.size()) {
    j["defined"] = false;
    return j;
  }
  auto tail = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(start), v.end());
  };
  CurveMatrix sm{tail(grid), {}};
  for (const auto& r : sims) sm.rows.push_back(tail(r));
  CurveMatrix om{sm.grid, {}};
  for (const auto& r : observed) om.rows.push_back(tail(r));
  const auto env = rank_envelope(sm, alpha);
  const auto verdicts = envelope_report(om, env);

  j["defined"] = true;
  j["envelope"] = env;
  json obs = json::array();
  for (std::size_t i = 0; i < om.rows.size(); ++i) {
    json v = verdicts[i];
    json values = json::array();
    for (double x : om.rows[i]) values.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    obs.push_back({{"subject_id", ids[i]}, {"verdict", v}, {"values", values}});
  }
  j["observed"] = obs;

  std::vector<double> seconds(env.grid.size());
  std::transform(env.grid.begin(), env.grid.end(), seconds.begin(), [](double t) { return t / 1000.0; });
  for (const auto& r : om.rows) panel.series.push_back({seconds, r, "#f28e2b", 0.8, false, true});
  panel.series.push_back({seconds, env.lower, "#000000", 1.4, false, true});
  panel.series.push_back({seconds, env.upper, "#000000", 1.4, false, true});
  return j;
}

json envelopes_for_group(const Context& ctx, Group g, const std::string& purpose,
                         std::vector<svg::Panel>& panels) {
  const auto& w = ctx.data.dataset.window;
  const double end = ctx.data.dataset.trial_length_ms;
  const auto pts = ctx.points(g);
  const auto model = build_model(ctx.data, g, ctx.model_config(pts));
  const auto runs = simulate_runs(model, group_seed(ctx.seed(), purpose, g), ctx.config.simulations);
  const auto grid = uniform_grid(0.0, end, ctx.config.envelope_points);

  std::vector<CurveSet> sim_curves(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    sim_curves[i] = curve_set(runs[i].sequence, w, end, grid, ctx.config);
  }
  std::vector<CurveSet> obs_curves;
  std::vector<std::string> ids;
  for (const auto* s : ctx.data.dataset.group(g)) {
    if (s->fixations.empty()) continue;
    obs_curves.push_back(curve_set(*s, w, end, grid, ctx.config));
    ids.push_back(s->subject_id);
  }

  auto collect = [](const std::vector<CurveSet>& sets, auto member) {
    std::vector<std::vector<double>> rows;
    for (const auto& cs : sets) rows.push_back(member(cs));
    return rows;
  };
  const auto tag = group_tag(g);
  json stats = json::object();
  auto add = [&](const std::string& name, const std::string& title, const std::string& ylabel,
                 auto member) {
    svg::Panel panel{title + " (" + tag + ")", "t (s)", ylabel, {}};
    stats[name] = envelope_entry(name, grid, collect(sim_curves, member), collect(obs_curves, member),
                                 ids, ctx.config.alpha, panel);
    panels.push_back(std::move(panel));
  };
  add("convex_hull_coverage", "Convex hull coverage", "AC(t)", [](const CurveSet& c) { return c.hull; });
  add("ball_union_coverage", "Ball union coverage", "AU(t)", [](const CurveSet& c) { return c.ball; });
  add("scanpath_length", "Scanpath length", "L(t) px", [](const CurveSet& c) { return c.path; });
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      const auto key = "transition_" + std::to_string(a + 1) + "->" + std::to_string(b + 1);
      add(key, "P(" + std::to_string(a + 1) + "->" + std::to_string(b + 1) + ")", "probability",
          [a, b](const CurveSet& c) { return c.transitions[a][b]; });
    }
  }

  std::size_t jumps = 0;
  std::size_t long_jumps = 0;
  for (const auto& r : runs) {
    jumps += r.jump_provenance.size();
    long_jumps += static_cast<std::size_t>(
        std::count(r.jump_provenance.begin(), r.jump_provenance.end(), JumpKind::uniform_long));
  }
  return {{"model", model_json(model)},
          {"simulations", runs.size()},
          {"long_jump_fraction", jumps ? static_cast<double>(long_jumps) / static_cast<double>(jumps) : 0.0},
          {"statistics", stats}};
}

// Compact per-statistic verdict table for summaries.
json verdict_table(const json& group_result) {
  json t = json::object();
  for (const auto& [name, entry] : group_result.at("statistics").items()) {
    if (!entry.value("defined", false)) continue;
    std::size_t inside = 0;
    for (const auto& o : entry.at("observed")) {
      if (o.at("verdict").at("inside").get<bool>()) ++inside;
    }
    t[name] = {{"k", entry.at("envelope").at("k")},
               {"observed", entry.at("observed").size()},
               {"inside", inside}};
  }
  return t;
}

json cmd_envelope(Context& ctx) {
  json out = {{"meta", ctx.meta()}, {"groups", json::object()}};
  for (Group g : ctx.groups()) {
    std::vector<svg::Panel> panels;
    auto result = envelopes_for_group(ctx, g, "envelope", panels);
    const auto tag = group_tag(g);
    for (const auto& [name, entry] : result.at("statistics").items()) {
      if (!entry.value("defined", false)) continue;
      RankEnvelope e;
      e.grid = entry.at("envelope").at("grid").get<std::vector<double>>();
      e.lower = entry.at("envelope").at("lower").get<std::vector<double>>();
      e.upper = entry.at("envelope").at("upper").get<std::vector<double>>();
      std::string file = name;
      std::replace(file.begin(), file.end(), '>', '_');
      std::replace(file.begin(), file.end(), '-', '_');
      write_text(ctx.out / ("envelope_" + tag + "_" + file + ".csv"),
                 stream_text([&](std::ostream& s) { write_envelope_csv(s, e); }));
    }
    write_json(ctx.out / ("envelopes_" + tag + ".json"), {{"meta", ctx.meta()}, {"result", result}});
    write_text(ctx.out / ("envelopes_" + tag + ".svg"), svg::panels(panels, 3));
    out["groups"][tag] = {{"model", result["model"]},
                          {"long_jump_fraction", result["long_jump_fraction"]},
                          {"verdicts", verdict_table(result)}};
  }
  return out;
}

// --- report ----------------------------------------------------------------

json cmd_report(Context& ctx) {
  json report = {{"meta", ctx.meta()}};
  std::size_t short_ex = 0, outside_ex = 0, missing = 0;
  for (const auto& r : ctx.data.reports) {
    short_ex += r.n_short_excluded;
    outside_ex += r.n_outside_excluded;
    missing += r.n_saccades_missing;
  }
  json counts = json::array();
  for (const auto& s : ctx.data.dataset.sequences) {
    counts.push_back({{"subject_id", s.subject_id}, {"group", to_string(s.group)},
                      {"fixations", s.fixations.size()}});
  }
  report["data"] = {{"rows", ctx.rows},
                    {"retained", ctx.data.dataset.fixation_count()},
                    {"short_excluded", short_ex},
                    {"outside_excluded", outside_ex},
                    {"saccades_missing", missing},
                    {"subjects", counts}};

  const auto all_points = ctx.points(std::nullopt);
  report["quadrat"] = quadrat_chisq(all_points, ctx.data.dataset.window, ctx.config.quadrats);

  json intensities = json::object();
  for (Group g : ctx.groups()) {
    const auto pts = ctx.points(g);
    const double h = ctx.bandwidth_for(pts, g == Group::novice ? ctx.config.h1 : ctx.config.h2);
    const auto grid = estimate_intensity(pts, ctx.data.dataset.window, h, ctx.config.nx, ctx.config.ny);
    write_text(ctx.out / ("report_intensity_" + group_tag(g) + ".svg"),
               svg::heatmap(grid.geometry, grid.values,
                            "Intensity " + group_tag(g) + ", h = " + csv::format_number(h)));
    intensities[group_tag(g)] = {{"bandwidth", h}, {"points", pts.size()}, {"max", grid.max()}};
  }
  report["intensity"] = intensities;

  const bool two_groups = !ctx.data.dataset.group(Group::novice).empty() &&
                          !ctx.data.dataset.group(Group::non_novice).empty();
  if (two_groups) {
    const auto r = run_ratio_test(ctx);
    report["compare_intensity"] = ratio_test_json(r, false);
    write_text(ctx.out / "report_log_ratio.svg",
               svg::heatmap(r.r_grid.geometry, r.r_grid.values, "Log density ratio", true));
    std::vector<svg::Panel> shift_panels;
    auto groups_cfg = ctx.config;
    groups_cfg.shift_mode = "groups";
    Context shift_ctx{groups_cfg, ctx.command, ctx.out, {}, ctx.data, ctx.rows, {}};
    json shifts = shift_comparisons(shift_ctx, shift_panels);
    report["shift"] = {{"x", "novice"}, {"y", "non_novice"},
                       {"zero_inside", shifts[0]["curve"]["zero_inside"]},
                       {"band_halfwidth", shifts[0]["curve"]["band_halfwidth"]}};
    write_text(ctx.out / "report_shift.svg", svg::panels(shift_panels, 1));
  }
  report["fits"] = fit_summary(ctx);

  json envelopes = json::object();
  for (Group g : ctx.groups()) {
    std::vector<svg::Panel> panels;
    const auto result = envelopes_for_group(ctx, g, "report", panels);
    write_text(ctx.out / ("report_envelopes_" + group_tag(g) + ".svg"), svg::panels(panels, 4));
    envelopes[group_tag(g)] = {{"model", result.at("model")},
                               {"long_jump_fraction", result.at("long_jump_fraction")},
                               {"verdicts", verdict_table(result)}};
    write_json(ctx.out / ("report_envelopes_" + group_tag(g) + ".json"),
               {{"meta", ctx.meta()}, {"result", result}});
  }
  report["envelopes"] = envelopes;
  write_json(ctx.out / "report.json", report);
  return report;
}

}  // namespace

json run_command(const std::string& command, const PipelineConfig& config) {
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  static const std::set<std::string> stochastic = {"compare-intensity", "simulate", "envelope", "report"};
  if (stochastic.contains(command) && !config.seed) {
    throw ConfigError("command '" + command + "' is stochastic and needs a seed");
  }
  auto ctx = load(command, config);
  if (command == "ingest") return cmd_ingest(ctx);
  if (command == "intensity") return cmd_intensity(ctx);
  if (command == "residuals") return cmd_residuals(ctx);
  if (command == "quadrat") return cmd_quadrat(ctx);
  if (command == "shift") return cmd_shift(ctx);
  if (command == "compare-intensity") return cmd_compare(ctx);
  if (command == "fit") return cmd_fit(ctx);
  if (command == "qq") return cmd_qq(ctx);
  if (command == "simulate") return cmd_simulate(ctx);
  if (command == "summaries") return cmd_summaries(ctx);
  if (command == "envelope") return cmd_envelope(ctx);
  if (command == "report") return cmd_report(ctx);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace fixproc
