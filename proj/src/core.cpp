#include "fixproc/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace fixproc {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Window::Window(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!(std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
        std::isfinite(y_max))) {
    throw ConfigError("window bounds must be finite");
  }
  if (!(x_max > x_min) || !(y_max > y_min)) {
    std::ostringstream msg;
    msg << "degenerate window [" << x_min << ", " << x_max << "] x [" << y_min << ", "
        << y_max << "]";
    throw ConfigError(msg.str());
  }
}

double Window::diagonal() const { return std::hypot(width(), height()); }

bool Window::contains(Point p) const {
  return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
}

std::string_view to_string(Group g) {
  switch (g) {
    case Group::novice:
      return "novice";
    case Group::non_novice:
      return "non_novice";
  }
  return "unknown";
}

Group parse_group(std::string_view s) {
  if (s == "novice") return Group::novice;
  if (s == "non_novice") return Group::non_novice;
  throw DataError("unknown group label '" + std::string(s) + "'");
}

std::vector<Point> FixationSequence::locations() const {
  std::vector<Point> out;
  out.reserve(fixations.size());
  for (const auto& f : fixations) out.push_back(f.location);
  return out;
}

std::vector<double> FixationSequence::durations() const {
  std::vector<double> out;
  out.reserve(fixations.size());
  for (const auto& f : fixations) out.push_back(f.duration_ms);
  return out;
}

void validate_sequence(const FixationSequence& s) {
  for (std::size_t i = 0; i + 1 < s.fixations.size(); ++i) {
    const auto& a = s.fixations[i];
    const auto& b = s.fixations[i + 1];
    if (!(b.onset_ms > a.onset_ms)) {
      throw DataError("subject " + s.subject_id + ": onsets not strictly increasing at index " +
                      std::to_string(i + 1));
    }
    if (a.offset_ms() > b.onset_ms) {
      throw DataError("subject " + s.subject_id + ": fixation " + std::to_string(i) +
                      " overlaps the next one");
    }
  }
}

std::vector<const FixationSequence*> Dataset::group(Group g) const {
  std::vector<const FixationSequence*> out;
  for (const auto& s : sequences) {
    if (s.group == g) out.push_back(&s);
  }
  return out;
}

std::size_t Dataset::fixation_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.fixations.size();
  return n;
}

int quadrant_of(Point p, const Window& w) {
  if (!w.contains(p)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") outside window";
    throw DataError(msg.str());
  }
  const double mid_x = 0.5 * (w.x_min() + w.x_max());
  const double mid_y = 0.5 * (w.y_min() + w.y_max());
  const int col = p.x >= mid_x ? 1 : 0;
  const int row = p.y >= mid_y ? 1 : 0;
  return 1 + col + 2 * row;
}

namespace {

std::array<Point, 4> corners(const Window& w) {
  return {Point{w.x_min(), w.y_min()}, Point{w.x_max(), w.y_min()},
          Point{w.x_min(), w.y_max()}, Point{w.x_max(), w.y_max()}};
}

}  // namespace

Point furthest_corner(Point p, const Window& w) {
  const auto cs = corners(w);
  return *std::max_element(cs.begin(), cs.end(), [p](Point a, Point b) {
    return distance(p, a) < distance(p, b);
  });
}

double max_corner_distance(Point p, const Window& w) {
  if (!w.contains(p)) {
    throw DataError("max_corner_distance: point outside window");
  }
  return distance(p, furthest_corner(p, w));
}

StepCurve::StepCurve(double initial_value, double domain_end)
    : knots_{0.0}, values_{initial_value}, domain_end_(domain_end) {
  if (!(domain_end >= 0.0)) throw ConfigError("StepCurve domain_end must be >= 0");
}

void StepCurve::push(double t, double value) {
  if (t < knots_.back()) {
    throw DataError("StepCurve knots must be nondecreasing");
  }
  if (t == knots_.back()) {
    values_.back() = value;
    return;
  }
  knots_.push_back(t);
  values_.push_back(value);
}

double StepCurve::at(double t) const {
  // Last knot <= t.
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

}  // namespace fixproc
