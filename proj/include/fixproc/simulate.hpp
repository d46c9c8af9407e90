#pragma once

// Generative reference model for the fixation process. The first location is
// drawn from the normalized first-fixation intensity; every saccade length is
// drawn from a mixture of a uniform long jump U(l_max / 2, l_max) (probability
// p_long) and a gamma law truncated at l_max, where l_max is the distance to
// the furthest window corner; the landing point lies on the circle of that
// radius, chosen according to the all-fixation intensity. Fixation durations
// (truncated below at the minimum fixation duration) and saccade durations are
// i.i.d. gamma draws.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fixproc/core.hpp"
#include "fixproc/density.hpp"
#include "fixproc/fitdist.hpp"
#include "fixproc/ingest.hpp"
#include "fixproc/random.hpp"

namespace fixproc {

struct FixationModel {
  IntensityGrid intensity_all;
  IntensityGrid intensity_first;
  GammaFit dur_fix;
  GammaFit dur_sac;
  GammaFit len_sac;
  double p_long = 0.2;
  Window window = Window::reference();
  double trial_length_ms = 180000.0;
  int n_angles = 720;
  double min_fixation_ms = 40.0;
  Group group = Group::novice;
  std::string painting_id = "painting";
};

/// Throws ConfigError unless the model satisfies its invariants.
void validate_model(const FixationModel& m);

struct ModelConfig {
  std::optional<double> bandwidth;        // all-fixation surface; CV when empty
  std::optional<double> bandwidth_first;  // first-fixation surface; defaults to bandwidth
  std::vector<double> h_candidates = default_bandwidth_candidates();
  int nx = 128;
  int ny = 128;
  double p_long = 0.2;
  int n_angles = 720;
  double min_fixation_ms = 40.0;
  /// Draw first locations from the all-fixation surface instead.
  bool first_from_all = false;
};

/// Fits the model for one group: intensity surfaces from that group's
/// fixations, fixation durations and saccade lengths from the group, saccade
/// durations pooled over every subject in the data.
FixationModel build_model(const PreparedData& data, Group group, const ModelConfig& config = {});

enum class JumpKind { gamma, uniform_long };

std::string_view to_string(JumpKind k);

struct SimRun {
  FixationSequence sequence;
  std::vector<JumpKind> jump_provenance;  // one per saccade
  std::vector<double> saccade_durations;  // one per saccade
  std::vector<double> saccade_lengths;    // one per saccade
  bool last_clipped = false;              // final duration cut at the horizon
};

/// Cell drawn proportional to its first-fixation intensity, then a uniform
/// position within the cell.
Point sample_initial(const FixationModel& m, Rng& rng);

struct JumpDraw {
  double length = 0.0;
  JumpKind kind = JumpKind::gamma;
};

JumpDraw sample_saccade_length(const FixationModel& m, Point from, Rng& rng);

/// Point at exactly distance l from `from`, chosen among n_angles equally
/// spaced directions plus the direction of the furthest corner, weighted by
/// the bilinearly interpolated all-fixation intensity (zero outside the
/// window).
Point next_location(const FixationModel& m, Point from, double l, Rng& rng);

/// One realization over [0, trial_length). Deterministic in (model, seed).
SimRun simulate_run(const FixationModel& m, Rng& rng, const std::string& subject_id = "sim");
SimRun simulate_run(const FixationModel& m, std::uint64_t seed);

/// `count` runs; run i uses the stream (seed, "simulate", i).
std::vector<SimRun> simulate_runs(const FixationModel& m, std::uint64_t seed, std::size_t count);

/// Wraps simulated runs as a dataset in the ingest schema.
Dataset to_dataset(const std::vector<SimRun>& runs, const FixationModel& m);

}  // namespace fixproc
