#include "fixproc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

#include "fixproc/parallel.hpp"

namespace fixproc {

void validate_model(const FixationModel& m) {
  if (!(m.p_long >= 0.0 && m.p_long <= 1.0)) throw ConfigError("p_long must lie in [0, 1]");
  if (m.n_angles < 1) throw ConfigError("n_angles must be positive");
  if (!(m.trial_length_ms >= 0.0)) throw ConfigError("trial length must be non-negative");
  if (!(m.min_fixation_ms >= 0.0)) throw ConfigError("minimum fixation duration must be >= 0");
  if (!(m.intensity_all.geometry.window == m.window) ||
      !(m.intensity_first.geometry.window == m.window)) {
    throw ConfigError("model intensity grids must share the model window");
  }
  if (m.intensity_all.values.size() != m.intensity_all.geometry.size() ||
      m.intensity_first.values.size() != m.intensity_first.geometry.size()) {
    throw ConfigError("model intensity grid has the wrong number of cells");
  }
  for (const GammaFit* g : {&m.dur_fix, &m.dur_sac, &m.len_sac}) {
    if (!(g->shape > 0.0) || !(g->rate > 0.0) || !std::isfinite(g->shape) ||
        !std::isfinite(g->rate)) {
      throw ConfigError("model gamma parameters must be finite and positive");
    }
  }
}

std::string_view to_string(JumpKind k) {
  return k == JumpKind::gamma ? "gamma" : "uniform_long";
}

FixationModel build_model(const PreparedData& data, Group group, const ModelConfig& config) {
  const auto& d = data.dataset;
  std::vector<Point> all_points;
  std::vector<Point> first_points;
  std::vector<double> fix_durations;
  std::vector<double> sac_durations;
  std::vector<double> sac_lengths;
  std::size_t members = 0;
  for (std::size_t i = 0; i < d.sequences.size(); ++i) {
    const auto& s = d.sequences[i];
    const bool in_group = s.group == group;
    const auto& sacs = data.saccades[i];
    for (const auto& sac : sacs) {
      if (!sac.valid) continue;
      if (sac.duration_ms > 0.0) sac_durations.push_back(sac.duration_ms);
      if (in_group && sac.length_px > 0.0) sac_lengths.push_back(sac.length_px);
    }
    if (!in_group) continue;
    ++members;
    if (s.fixations.empty()) continue;
    first_points.push_back(s.fixations.front().location);
    for (const auto& f : s.fixations) {
      all_points.push_back(f.location);
      fix_durations.push_back(f.duration_ms);
    }
  }
  if (members == 0) {
    throw DataError("no subjects in group " + std::string(to_string(group)));
  }
  if (first_points.empty()) throw DataError("group has no first fixations");

  FixationModel m;
  m.window = d.window;
  m.trial_length_ms = d.trial_length_ms;
  m.p_long = config.p_long;
  m.n_angles = config.n_angles;
  m.min_fixation_ms = config.min_fixation_ms;
  m.group = group;
  m.painting_id = d.sequences.front().painting_id;

  const double h = config.bandwidth
                       ? *config.bandwidth
                       : select_bandwidth_cv(all_points, d.window, config.h_candidates, config.nx,
                                             config.ny);
  m.intensity_all = estimate_intensity(all_points, d.window, h, config.nx, config.ny);
  if (config.first_from_all) {
    m.intensity_first = m.intensity_all;
  } else {
    const double h_first = config.bandwidth_first.value_or(h);
    m.intensity_first = estimate_intensity(first_points, d.window, h_first, config.nx, config.ny);
  }

  m.dur_fix = fit_gamma_mle(fix_durations, GammaSource::fixation_duration);
  m.dur_sac = fit_gamma_mle(sac_durations, GammaSource::saccade_duration);
  m.len_sac = fit_gamma_mle(sac_lengths, GammaSource::saccade_length);
  validate_model(m);
  return m;
}

Point sample_initial(const FixationModel& m, Rng& rng) {
  const auto& grid = m.intensity_first;
  const auto& g = grid.geometry;
  std::vector<double> cumulative(grid.values.size());
  std::partial_sum(grid.values.begin(), grid.values.end(), cumulative.begin());
  const double target = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  const auto cell = static_cast<std::size_t>(it - cumulative.begin());
  const int ix = static_cast<int>(cell % static_cast<std::size_t>(g.nx));
  const int iy = static_cast<int>(cell / static_cast<std::size_t>(g.nx));
  const double x = g.window.x_min() + (ix + rng.uniform()) * g.cell_width();
  const double y = g.window.y_min() + (iy + rng.uniform()) * g.cell_height();
  return {std::clamp(x, g.window.x_min(), g.window.x_max()),
          std::clamp(y, g.window.y_min(), g.window.y_max())};
}

JumpDraw sample_saccade_length(const FixationModel& m, Point from, Rng& rng) {
  const double l_max = max_corner_distance(from, m.window);
  if (rng.bernoulli(m.p_long)) {
    return {rng.uniform(0.5 * l_max, l_max), JumpKind::uniform_long};
  }
  return {sample_truncated_gamma(m.len_sac, l_max, rng), JumpKind::gamma};
}

Point next_location(const FixationModel& m, Point from, double l, Rng& rng) {
  const double l_max = max_corner_distance(from, m.window);
  if (!(l > 0.0) || l > l_max * (1.0 + 1e-12)) {
    throw DataError("saccade length outside (0, l_max]");
  }
  const auto n = static_cast<std::size_t>(m.n_angles);
  std::vector<Point> candidates(n + 1);
  std::vector<double> weights(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    candidates[k] = {from.x + l * std::cos(theta), from.y + l * std::sin(theta)};
  }
  // The furthest-corner direction always stays inside a convex window.
  const Point corner = furthest_corner(from, m.window);
  const double reach = distance(from, corner);
  Point guaranteed{from.x + l * (corner.x - from.x) / reach, from.y + l * (corner.y - from.y) / reach};
  guaranteed.x = std::clamp(guaranteed.x, m.window.x_min(), m.window.x_max());
  guaranteed.y = std::clamp(guaranteed.y, m.window.y_min(), m.window.y_max());
  candidates[n] = guaranteed;

  double total = 0.0;
  std::size_t inside = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (m.window.contains(candidates[k])) {
      weights[k] = m.intensity_all.interpolate(candidates[k]);
      ++inside;
    } else {
      weights[k] = 0.0;
    }
    total += weights[k];
  }
  if (inside == 0) throw DataError("no landing point inside the window");
  if (!(total > 0.0)) {
    // Zero intensity on the whole circle: fall back to uniform over the
    // admissible candidates.
    for (std::size_t k = 0; k <= n; ++k) weights[k] = m.window.contains(candidates[k]) ? 1.0 : 0.0;
    total = static_cast<double>(inside);
  }
  double target = rng.uniform() * total;
  for (std::size_t k = 0; k <= n; ++k) {
    if (weights[k] == 0.0) continue;
    target -= weights[k];
    if (target <= 0.0) return candidates[k];
  }
  // Rounding left a sliver of mass: take the last admissible candidate.
  for (std::size_t k = n + 1; k-- > 0;) {
    if (weights[k] > 0.0) return candidates[k];
  }
  return guaranteed;
}

SimRun simulate_run(const FixationModel& m, Rng& rng, const std::string& subject_id) {
  validate_model(m);
  SimRun run;
  run.sequence.subject_id = subject_id;
  run.sequence.group = m.group;
  run.sequence.painting_id = m.painting_id;
  const double horizon = m.trial_length_ms;
  const double inf = std::numeric_limits<double>::infinity();

  Point location = sample_initial(m, rng);
  double clock = 0.0;
  while (clock < horizon) {
    Fixation f;
    f.location = location;
    f.onset_ms = clock;
    f.duration_ms = m.min_fixation_ms > 0.0
                        ? sample_truncated_gamma(m.dur_fix, m.min_fixation_ms, inf, rng)
                        : sample_gamma(m.dur_fix, rng);
    clock = f.onset_ms + f.duration_ms;
    if (clock >= horizon) {
      f.duration_ms = horizon - f.onset_ms;
      run.last_clipped = true;
      run.sequence.fixations.push_back(f);
      break;
    }
    run.sequence.fixations.push_back(f);

    const auto jump = sample_saccade_length(m, location, rng);
    const Point next = next_location(m, location, jump.length, rng);
    const double sac_duration = sample_gamma(m.dur_sac, rng);
    clock += sac_duration;
    if (clock >= horizon) break;
    run.jump_provenance.push_back(jump.kind);
    run.saccade_durations.push_back(sac_duration);
    run.saccade_lengths.push_back(jump.length);
    location = next;
  }
  return run;
}

SimRun simulate_run(const FixationModel& m, std::uint64_t seed) {
  auto rng = Rng::stream(seed, "simulate", 0);
  return simulate_run(m, rng, "sim_0000");
}

namespace {

std::string run_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sim_%04zu", i);
  return buf;
}

}  // namespace

std::vector<SimRun> simulate_runs(const FixationModel& m, std::uint64_t seed, std::size_t count) {
  validate_model(m);
  std::vector<SimRun> runs(count);
  parallel_for(count, [&](std::size_t i) {
    auto rng = Rng::stream(seed, "simulate", i);
    runs[i] = simulate_run(m, rng, run_id(i));
  });
  return runs;
}

Dataset to_dataset(const std::vector<SimRun>& runs, const FixationModel& m) {
  Dataset d;
  d.window = m.window;
  d.trial_length_ms = m.trial_length_ms;
  for (const auto& r : runs) d.sequences.push_back(r.sequence);
  return d;
}

}  // namespace fixproc
