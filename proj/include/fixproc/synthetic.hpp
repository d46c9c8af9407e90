#pragma once

// Synthetic fixation models built from Gaussian hotspot surfaces, for test
// fixtures and the bundled two-group example dataset.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fixproc/simulate.hpp"

namespace fixproc {

struct Hotspot {
  Point center;
  double sigma = 60.0;
  double weight = 1.0;
};

/// background + sum_j weight_j exp(-|x - c_j|^2 / (2 sigma_j^2)) at the cell
/// centers. The surface is relative; the simulator only uses ratios.
IntensityGrid hotspot_surface(const Window& w, std::span<const Hotspot> hotspots, int nx = 128,
                              int ny = 128, double background = 0.05);

struct SyntheticParams {
  Window window = Window::reference();
  double trial_length_ms = 180000.0;
  GammaFit dur_fix{3.0, 0.01, 0, GammaSource::fixation_duration};     // mean 300 ms
  GammaFit dur_sac{2.0, 0.05, 0, GammaSource::saccade_duration};      // mean 40 ms
  GammaFit len_sac{2.0, 2.0 / 150.0, 0, GammaSource::saccade_length};  // mean 150 px
  double p_long = 0.2;
  int nx = 128;
  int ny = 128;
  int n_angles = 360;
};

FixationModel synthetic_model(std::span<const Hotspot> hotspots, Group group,
                              const SyntheticParams& params = {});

/// Three hotspots shared by both groups; the non_novice layout moves the
/// third one by `shift` px to the right.
std::vector<Hotspot> reference_hotspots(Group group, double shift = 0.0);

/// `count` simulated subjects named <prefix>_01, <prefix>_02, ...; subject i
/// uses the stream (seed, "subject/" + prefix, i).
std::vector<FixationSequence> simulate_subjects(const FixationModel& m, std::size_t count,
                                                std::uint64_t seed, const std::string& prefix);

}  // namespace fixproc
