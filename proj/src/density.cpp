#include "fixproc/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

namespace fixproc {

namespace {

// Beyond this many bandwidths the Gaussian factor underflows to zero.
constexpr double kKernelReach = 39.0;
constexpr double kPairReach = 9.0;

double gauss_density(double d, double h) {
  const double z = d / h;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * h);
}

void check_points(std::span<const Point> points, const Window& w) {
  if (points.empty()) throw DataError("intensity estimation needs at least one point");
  for (const auto& p : points) {
    if (!w.contains(p)) throw DataError("point outside the observation window");
  }
}

void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("bandwidth must be positive");
}

// Column range whose Gaussian factor can be nonzero.
std::pair<int, int> reach(double center, double origin, double step, int count, double h) {
  const double lo = (center - kKernelReach * h - origin) / step - 0.5;
  const double hi = (center + kKernelReach * h - origin) / step + 0.5;
  const int a = std::clamp(static_cast<int>(std::floor(lo)), 0, count);
  const int b = std::clamp(static_cast<int>(std::ceil(hi)) + 1, 0, count);
  return {a, b};
}

std::vector<double> axis_correction(double lo, double hi, double step, int count, double h) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double c = lo + (i + 0.5) * step;
    out[static_cast<std::size_t>(i)] = normal_cdf_diff((lo - c) / h, (hi - c) / h);
  }
  return out;
}

}  // namespace

GridGeometry::GridGeometry(const Window& w, int nx_, int ny_) : window(w), nx(nx_), ny(ny_) {
  if (nx < 1 || ny < 1) throw ConfigError("grid dimensions must be positive");
}

double ScalarGrid::riemann_sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * geometry.cell_area();
}

double IntensityGrid::integral() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * geometry.cell_area();
}

double IntensityGrid::max() const { return *std::max_element(values.begin(), values.end()); }

double IntensityGrid::interpolate(Point p) const {
  const auto& g = geometry;
  const double fx = (p.x - g.window.x_min()) / g.cell_width() - 0.5;
  const double fy = (p.y - g.window.y_min()) / g.cell_height() - 0.5;
  const double cx = std::clamp(fx, 0.0, static_cast<double>(g.nx - 1));
  const double cy = std::clamp(fy, 0.0, static_cast<double>(g.ny - 1));
  const int ix0 = std::min(static_cast<int>(cx), g.nx - 1);
  const int iy0 = std::min(static_cast<int>(cy), g.ny - 1);
  const int ix1 = std::min(ix0 + 1, g.nx - 1);
  const int iy1 = std::min(iy0 + 1, g.ny - 1);
  const double tx = cx - ix0;
  const double ty = cy - iy0;
  const double top = (1.0 - tx) * at(ix0, iy0) + tx * at(ix1, iy0);
  const double bottom = (1.0 - tx) * at(ix0, iy1) + tx * at(ix1, iy1);
  return (1.0 - ty) * top + ty * bottom;
}

double normal_cdf_diff(double a, double b) {
  // Work in whichever tail keeps the subtraction well conditioned.
  if (a >= 0.0) {
    return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
  }
  if (b <= 0.0) {
    return 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
  }
  return 1.0 - 0.5 * std::erfc(b / std::numbers::sqrt2) - 0.5 * std::erfc(-a / std::numbers::sqrt2);
}

double edge_correction(Point p, const Window& w, double h) {
  check_bandwidth(h);
  return normal_cdf_diff((w.x_min() - p.x) / h, (w.x_max() - p.x) / h) *
         normal_cdf_diff((w.y_min() - p.y) / h, (w.y_max() - p.y) / h);
}

std::vector<double> edge_correction_grid(const GridGeometry& g, double h) {
  check_bandwidth(h);
  const auto ex = axis_correction(g.window.x_min(), g.window.x_max(), g.cell_width(), g.nx, h);
  const auto ey = axis_correction(g.window.y_min(), g.window.y_max(), g.cell_height(), g.ny, h);
  std::vector<double> out(g.size());
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      out[g.index(ix, iy)] = ex[static_cast<std::size_t>(ix)] * ey[static_cast<std::size_t>(iy)];
    }
  }
  return out;
}

std::vector<double> kernel_sum_grid(std::span<const Point> points, const GridGeometry& g, double h) {
  check_bandwidth(h);
  std::vector<double> sum(g.size(), 0.0);
  std::vector<double> gx(static_cast<std::size_t>(g.nx));
  const double x0 = g.window.x_min();
  const double y0 = g.window.y_min();
  // The bivariate kernel factorizes: h^-2 K(d / h) = phi_h(dx) * phi_h(dy).
  for (const auto& p : points) {
    const auto [ax, bx] = reach(p.x, x0, g.cell_width(), g.nx, h);
    const auto [ay, by] = reach(p.y, y0, g.cell_height(), g.ny, h);
    for (int ix = ax; ix < bx; ++ix) {
      gx[static_cast<std::size_t>(ix)] = gauss_density(g.center_x(ix) - p.x, h);
    }
    for (int iy = ay; iy < by; ++iy) {
      const double wy = gauss_density(g.center_y(iy) - p.y, h);
      if (wy == 0.0) continue;
      double* row = sum.data() + g.index(0, iy);
      for (int ix = ax; ix < bx; ++ix) row[ix] += wy * gx[static_cast<std::size_t>(ix)];
    }
  }
  return sum;
}

IntensityGrid finish_intensity(const GridGeometry& g, double h, std::span<const double> kernel_sum,
                               std::span<const double> edge) {
  IntensityGrid out;
  out.geometry = g;
  out.bandwidth = h;
  out.values.resize(g.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = std::max(kernel_sum[i] / edge[i], kIntensityFloor);
  }
  return out;
}

IntensityGrid estimate_intensity(std::span<const Point> points, const Window& w, double h, int nx,
                                 int ny) {
  check_bandwidth(h);
  check_points(points, w);
  const GridGeometry g(w, nx, ny);
  const auto sum = kernel_sum_grid(points, g, h);
  const auto edge = edge_correction_grid(g, h);
  return finish_intensity(g, h, sum, edge);
}

double lscv_score(std::span<const Point> points, const Window& w, double h, int nx, int ny) {
  check_bandwidth(h);
  check_points(points, w);
  const GridGeometry g(w, nx, ny);
  const std::size_t n = points.size();
  if (n < 2) throw DataError("cross-validation needs at least two points");

  const auto ex = axis_correction(w.x_min(), w.x_max(), g.cell_width(), g.nx, h);
  const auto ey = axis_correction(w.y_min(), w.y_max(), g.cell_height(), g.ny, h);
  const auto sum = kernel_sum_grid(points, g, h);

  double mass = 0.0;  // integral of the edge-corrected intensity
  double mass_sq = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const double lambda =
          sum[g.index(ix, iy)] / (ex[static_cast<std::size_t>(ix)] * ey[static_cast<std::size_t>(iy)]);
      mass += lambda;
      mass_sq += lambda * lambda;
    }
  }
  mass *= g.cell_area();
  mass_sq *= g.cell_area();
  const double integral_f_sq = mass_sq / (mass * mass);

  // Leave-one-out terms. Pairs are visited in x order and cut off once the
  // kernel drops below 1e-17 of its peak.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a].x < points[b].x; });
  std::vector<double> pair_sum(n, 0.0);
  const double cutoff = kPairReach * h;
  const double inv_two_h2 = 1.0 / (2.0 * h * h);
  const double norm = 1.0 / (2.0 * std::numbers::pi * h * h);
  for (std::size_t a = 0; a < n; ++a) {
    const Point pa = points[order[a]];
    for (std::size_t b = a + 1; b < n; ++b) {
      const Point pb = points[order[b]];
      const double dx = pb.x - pa.x;
      if (dx > cutoff) break;
      const double dy = pb.y - pa.y;
      const double k = norm * std::exp(-(dx * dx + dy * dy) * inv_two_h2);
      pair_sum[order[a]] += k;
      pair_sum[order[b]] += k;
    }
  }

  double loo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = points[i];
    // Mass removed from the grid integral when point i is left out; the
    // corrected kernel factorizes across the axes.
    double sx = 0.0;
    for (int ix = 0; ix < g.nx; ++ix) {
      sx += gauss_density(g.center_x(ix) - p.x, h) / ex[static_cast<std::size_t>(ix)];
    }
    double sy = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
      sy += gauss_density(g.center_y(iy) - p.y, h) / ey[static_cast<std::size_t>(iy)];
    }
    const double mass_without = mass - sx * sy * g.cell_area();
    const double lambda_without = pair_sum[i] / edge_correction(p, w, h);
    loo += lambda_without / mass_without;
  }
  return integral_f_sq - 2.0 * loo / static_cast<double>(n);
}

double select_bandwidth_cv(std::span<const Point> points, const Window& w,
                           std::span<const double> h_grid, int nx, int ny) {
  if (h_grid.empty()) throw ConfigError("bandwidth candidate list is empty");
  for (double h : h_grid) check_bandwidth(h);
  if (h_grid.size() == 1) return h_grid.front();
  if (points.size() < 10) throw DataError("bandwidth selection needs at least 10 points");

  double best_h = std::numeric_limits<double>::quiet_NaN();
  double best_score = std::numeric_limits<double>::infinity();
  for (double h : h_grid) {
    const double s = lscv_score(points, w, h, nx, ny);
    if (std::isfinite(s) && s < best_score) {
      best_score = s;
      best_h = h;
    }
  }
  if (std::isnan(best_h)) throw NumericError("all cross-validation scores are non-finite");
  return best_h;
}

std::vector<double> default_bandwidth_candidates() {
  std::vector<double> out;
  for (int h = 4; h <= 60; ++h) out.push_back(h);
  return out;
}

ResidualResult residual_intensities(const Dataset& d, double interval_ms, double h, int nx,
                                    int ny) {
  check_bandwidth(h);
  if (!(interval_ms > 0.0)) throw ConfigError("interval must be positive");
  if (!(d.trial_length_ms > 0.0)) throw ConfigError("trial length must be positive");
  const GridGeometry g(d.window, nx, ny);
  const auto k_count = static_cast<std::size_t>(std::ceil(d.trial_length_ms / interval_ms - 1e-9));

  ResidualResult out;
  std::vector<std::vector<Point>> buckets(k_count);
  std::size_t ignored = 0;
  for (const auto& s : d.sequences) {
    for (const auto& f : s.fixations) {
      if (f.onset_ms < 0.0 || f.onset_ms >= d.trial_length_ms) {
        ++ignored;
        continue;
      }
      const auto k = std::min(static_cast<std::size_t>(f.onset_ms / interval_ms), k_count - 1);
      buckets[k].push_back(f.location);
    }
  }
  if (ignored > 0) {
    out.warnings.push_back(std::to_string(ignored) + " fixations outside [0, trial_length) ignored");
  }

  const auto edge = edge_correction_grid(g, h);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (buckets[k].empty()) {
      out.warnings.push_back("interval " + std::to_string(k) +
                             " has no fixations; using the zero surface");
      out.intensities.push_back(IntensityGrid{g, h, std::vector<double>(g.size(), 0.0)});
      continue;
    }
    check_points(buckets[k], d.window);
    const auto sum = kernel_sum_grid(buckets[k], g, h);
    out.intensities.push_back(finish_intensity(g, h, sum, edge));
  }

  std::vector<double> mean(g.size(), 0.0);
  for (const auto& grid : out.intensities) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += grid.values[i];
  }
  for (auto& v : mean) v /= static_cast<double>(k_count);
  for (const auto& grid : out.intensities) {
    ScalarGrid r{g, std::vector<double>(g.size())};
    for (std::size_t i = 0; i < mean.size(); ++i) r.values[i] = grid.values[i] - mean[i];
    out.residuals.push_back(std::move(r));
  }
  return out;
}

QuadratTestResult quadrat_chisq(std::span<const Point> points, const Window& w, int q) {
  if (q < 2) throw ConfigError("quadrat side count must be at least 2");
  if (points.empty()) throw DataError("quadrat test needs at least one point");
  QuadratTestResult r;
  r.q = q;
  r.df = q * q - 1;
  r.counts.assign(static_cast<std::size_t>(q * q), 0);
  for (const auto& p : points) {
    if (!w.contains(p)) throw DataError("point outside the observation window");
    const int cx = std::min(q - 1, static_cast<int>((p.x - w.x_min()) / w.width() * q));
    const int cy = std::min(q - 1, static_cast<int>((p.y - w.y_min()) / w.height() * q));
    ++r.counts[static_cast<std::size_t>(cy * q + cx)];
  }
  const double n = static_cast<double>(points.size());
  const double expected = n / (q * q);
  if (n < 5.0 * q * q) {
    r.warnings.push_back("fewer than 5 expected points per quadrat; chi-square approximation is rough");
  }
  r.statistic = 0.0;
  for (auto c : r.counts) {
    const double diff = static_cast<double>(c) - expected;
    r.statistic += diff * diff / expected;
  }
  r.p = chisq_sf(r.statistic, r.df);
  return r;
}

double chisq_sf(double x, double df) {
  if (!(df > 0.0)) throw ConfigError("chi-square degrees of freedom must be positive");
  if (!(x >= 0.0)) throw ConfigError("chi-square statistic must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace fixproc
