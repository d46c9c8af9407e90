#include "fixproc/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fixproc {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  if (n < 3) return points;
  std::vector<Point> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = polygon[i];
    const Point b = polygon[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(0.5 * twice);
}

StepCurve convex_hull_coverage(const FixationSequence& s, const Window& w, double domain_end) {
  StepCurve curve(0.0, domain_end);
  std::vector<Point> hull;
  std::size_t seen = 0;
  for (const auto& f : s.fixations) {
    ++seen;
    // The new hull only depends on the old hull vertices and the new point.
    hull.push_back(f.location);
    hull = convex_hull(std::move(hull));
    const double value = seen < 3 ? 0.0 : polygon_area(hull) / w.area();
    curve.push(f.onset_ms, std::min(value, 1.0));
  }
  return curve;
}

StepCurve ball_union_coverage(const FixationSequence& s, const Window& w, double domain_end,
                              double radius, double raster_px) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  if (!(raster_px > 0.0)) throw ConfigError("raster cell size must be positive");
  if (raster_px > radius) throw ConfigError("raster cell larger than the ball radius");

  const int nx = std::max(1, static_cast<int>(std::lround(w.width() / raster_px)));
  const int ny = std::max(1, static_cast<int>(std::lround(w.height() / raster_px)));
  const double cw = w.width() / nx;
  const double ch = w.height() / ny;
  const double total = static_cast<double>(nx) * ny;
  std::vector<unsigned char> covered(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);
  std::size_t count = 0;
  const double r2 = radius * radius;

  StepCurve curve(0.0, domain_end);
  for (const auto& f : s.fixations) {
    const Point p = f.location;
    const int ix0 = std::max(0, static_cast<int>(std::floor((p.x - radius - w.x_min()) / cw)));
    const int ix1 = std::min(nx - 1, static_cast<int>(std::floor((p.x + radius - w.x_min()) / cw)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((p.y - radius - w.y_min()) / ch)));
    const int iy1 = std::min(ny - 1, static_cast<int>(std::floor((p.y + radius - w.y_min()) / ch)));
    for (int iy = iy0; iy <= iy1; ++iy) {
      const double dy = w.y_min() + (iy + 0.5) * ch - p.y;
      for (int ix = ix0; ix <= ix1; ++ix) {
        const double dx = w.x_min() + (ix + 0.5) * cw - p.x;
        if (dx * dx + dy * dy > r2) continue;
        auto& cell = covered[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
                             static_cast<std::size_t>(ix)];
        if (!cell) {
          cell = 1;
          ++count;
        }
      }
    }
    curve.push(f.onset_ms, static_cast<double>(count) / total);
  }
  return curve;
}

StepCurve scanpath_length(const FixationSequence& s, double domain_end) {
  StepCurve curve(0.0, domain_end);
  double total = 0.0;
  for (std::size_t i = 1; i < s.fixations.size(); ++i) {
    total += distance(s.fixations[i - 1].location, s.fixations[i].location);
    curve.push(s.fixations[i].onset_ms, total);
  }
  return curve;
}

TransitionCurves transition_curves(const FixationSequence& s, const Window& w, double domain_end) {
  if (s.fixations.size() < 2) throw DataError("transition curves need at least two fixations");
  const double undefined = std::numeric_limits<double>::quiet_NaN();
  TransitionCurves out;
  for (auto& row : out.curves) {
    for (auto& c : row) c = StepCurve(undefined, domain_end);
  }
  int state = quadrant_of(s.fixations.front().location, w) - 1;
  for (std::size_t i = 1; i < s.fixations.size(); ++i) {
    const int next = quadrant_of(s.fixations[i].location, w) - 1;
    ++out.counts[static_cast<std::size_t>(state)][static_cast<std::size_t>(next)];
    ++out.row_counts[static_cast<std::size_t>(state)];
    const double t = s.fixations[i].onset_ms;
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        const double v = out.row_counts[a] == 0
                             ? undefined
                             : static_cast<double>(out.counts[a][b]) /
                                   static_cast<double>(out.row_counts[a]);
        out.curves[a][b].push(t, v);
      }
    }
    state = next;
  }
  return out;
}

std::vector<double> resample_curve(const StepCurve& c, std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) {
    if (t < 0.0 || t > c.domain_end()) throw ConfigError("resample time outside the curve domain");
    out.push_back(c.at(t));
  }
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t count) {
  if (count < 2) throw ConfigError("grid needs at least two points");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = t1;
  return out;
}

}  // namespace fixproc
