#pragma once

// Edge-corrected Gaussian kernel intensity estimation, least-squares
// cross-validated bandwidth selection, residual interval intensities and the
// quadrat chi-square test.

#include <span>
#include <string>
#include <vector>

#include "fixproc/core.hpp"

namespace fixproc {

/// Regular nx x ny partition of a window; values are indexed iy * nx + ix
/// with iy = 0 the top row (smallest y).
struct GridGeometry {
  Window window = Window::reference();
  int nx = 128;
  int ny = 128;

  GridGeometry() = default;
  GridGeometry(const Window& w, int nx_, int ny_);

  double cell_width() const { return window.width() / nx; }
  double cell_height() const { return window.height() / ny; }
  double cell_area() const { return cell_width() * cell_height(); }
  double center_x(int ix) const { return window.x_min() + (ix + 0.5) * cell_width(); }
  double center_y(int iy) const { return window.y_min() + (iy + 0.5) * cell_height(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  }

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Real-valued surface on a grid (residuals, log ratios).
struct ScalarGrid {
  GridGeometry geometry;
  std::vector<double> values;

  double riemann_sum() const;
};

/// Intensity estimate in points per px^2 at the cell centers.
struct IntensityGrid {
  GridGeometry geometry;
  double bandwidth = 0.0;
  std::vector<double> values;

  double at(int ix, int iy) const { return values[geometry.index(ix, iy)]; }
  /// Midpoint Riemann approximation of the integral over the window.
  double integral() const;
  double max() const;
  /// Bilinear interpolation between cell centers, clamped at the border.
  double interpolate(Point p) const;
};

/// Smallest value stored in an intensity grid. Kernel sums that underflow
/// double precision far from every point are raised to this floor so that
/// intensities stay strictly positive and logarithms stay finite.
inline constexpr double kIntensityFloor = 2.2250738585072014e-308;

/// Standard normal CDF difference Phi(b) - Phi(a) for a <= b.
double normal_cdf_diff(double a, double b);

/// Kernel mass kept inside w for a Gaussian of bandwidth h centered at p:
/// the denominator of the edge-corrected estimator. Lies in (0, 1].
double edge_correction(Point p, const Window& w, double h);

/// Edge correction evaluated at every cell center.
std::vector<double> edge_correction_grid(const GridGeometry& g, double h);

/// Uncorrected kernel sum sum_i h^-2 K((x - x_i) / h) at every cell center.
std::vector<double> kernel_sum_grid(std::span<const Point> points, const GridGeometry& g, double h);

/// numerator / edge correction, floored at kIntensityFloor.
IntensityGrid finish_intensity(const GridGeometry& g, double h, std::span<const double> kernel_sum,
                               std::span<const double> edge);

/// Edge-corrected kernel intensity estimate with a standard bivariate Gaussian
/// kernel. Throws ConfigError for h <= 0 and DataError for an empty or
/// out-of-window point set.
IntensityGrid estimate_intensity(std::span<const Point> points, const Window& w, double h,
                                 int nx = 128, int ny = 128);

/// Leave-one-out least-squares cross-validation score of the normalized
/// edge-corrected density; the integral term is a Riemann sum on the grid.
double lscv_score(std::span<const Point> points, const Window& w, double h, int nx = 128,
                  int ny = 128);

/// Candidate bandwidth minimising lscv_score. Requires at least 10 points.
double select_bandwidth_cv(std::span<const Point> points, const Window& w,
                           std::span<const double> h_grid, int nx = 128, int ny = 128);

/// Default candidate set for select_bandwidth_cv: 4..60 px in steps of 1.
std::vector<double> default_bandwidth_candidates();

struct ResidualResult {
  std::vector<IntensityGrid> intensities;  // one per interval
  std::vector<ScalarGrid> residuals;       // intensity minus interval mean
  std::vector<std::string> warnings;
};

/// Pools fixations of all sequences by onset into consecutive intervals of
/// interval_ms (the last one truncated at the trial length) and returns each
/// interval's intensity minus the mean intensity across intervals. Empty
/// intervals contribute the all-zero surface and a warning.
ResidualResult residual_intensities(const Dataset& d, double interval_ms, double h, int nx = 128,
                                    int ny = 128);

struct QuadratTestResult {
  double statistic = 0.0;
  int df = 0;
  double p = 1.0;
  int q = 0;
  std::vector<std::size_t> counts;  // q x q, row-major from the top-left quadrat
  std::vector<std::string> warnings;
};

QuadratTestResult quadrat_chisq(std::span<const Point> points, const Window& w, int q = 5);

/// Upper tail probability of the chi-square distribution.
double chisq_sf(double x, double df);

}  // namespace fixproc
