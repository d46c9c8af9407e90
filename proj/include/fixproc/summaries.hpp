#pragma once

// Functional summaries of one fixation sequence, updated at every fixation
// onset: convex hull coverage, ball union coverage, scanpath length and
// running quadrant transition frequencies.

#include <array>
#include <span>
#include <vector>

#include "fixproc/core.hpp"

namespace fixproc {

/// Convex hull in counter-clockwise order (monotone chain); collinear points
/// are dropped.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Shoelace area of a simple polygon.
double polygon_area(std::span<const Point> polygon);

/// Hull area relative to the window area; 0 while fewer than three
/// fixations have appeared.
StepCurve convex_hull_coverage(const FixationSequence& s, const Window& w, double domain_end);

/// Fraction of raster cells (nominal side raster_px) whose center lies
/// within R of some fixation so far. Throws ConfigError if raster_px > R.
StepCurve ball_union_coverage(const FixationSequence& s, const Window& w, double domain_end,
                              double radius = 35.0, double raster_px = 1.0);

/// Cumulative saccade length, stepping at each fixation onset after the first.
StepCurve scanpath_length(const FixationSequence& s, double domain_end);

struct TransitionCurves {
  /// curves[a][b] estimates P(next state b | state a), states 0-based here.
  /// Undefined entries (row never left) are NaN.
  std::array<std::array<StepCurve, 4>, 4> curves;
  std::array<std::array<std::size_t, 4>, 4> counts{};  // final N_ab
  std::array<std::size_t, 4> row_counts{};              // final N_a
};

TransitionCurves transition_curves(const FixationSequence& s, const Window& w, double domain_end);

/// Right-continuous evaluation on the given time points.
std::vector<double> resample_curve(const StepCurve& c, std::span<const double> grid);

/// count equally spaced points from t0 to t1 inclusive.
std::vector<double> uniform_grid(double t0, double t1, std::size_t count);

}  // namespace fixproc
