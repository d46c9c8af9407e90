#pragma once

// Domain types and elementary geometry shared by the fixation-process modules.
// Coordinates are continuous pixels in image convention (y grows downward).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fixproc {

// Error hierarchy. The CLI maps each kind to its own exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class NumericError : public Error {
public:
  using Error::Error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

/// Rectangular observation window [x_min, x_max] x [y_min, y_max].
class Window {
public:
  Window(double x_min, double y_min, double x_max, double y_max);

  /// The 770 x 768 px painting extent used as the default window.
  static Window reference() { return Window(0.0, 0.0, 770.0, 768.0); }

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }
  double diagonal() const;

  /// Closed containment test.
  bool contains(Point p) const;

  friend bool operator==(const Window&, const Window&) = default;

private:
  double x_min_;
  double y_min_;
  double x_max_;
  double y_max_;
};

struct Fixation {
  Point location;
  double onset_ms = 0.0;
  double duration_ms = 0.0;

  double offset_ms() const { return onset_ms + duration_ms; }

  friend bool operator==(const Fixation&, const Fixation&) = default;
};

struct Saccade {
  std::size_t from_index = 0;
  std::size_t to_index = 0;
  double length_px = 0.0;
  double duration_ms = 0.0;
  bool valid = true;
};

enum class Group { novice, non_novice };

std::string_view to_string(Group g);
Group parse_group(std::string_view s);

struct FixationSequence {
  std::string subject_id;
  Group group = Group::novice;
  std::string painting_id;
  std::vector<Fixation> fixations;

  std::vector<Point> locations() const;
  std::vector<double> durations() const;
};

/// Throws DataError unless onsets are strictly increasing and fixations do
/// not overlap.
void validate_sequence(const FixationSequence& s);

struct Dataset {
  Window window = Window::reference();
  std::vector<FixationSequence> sequences;
  double trial_length_ms = 180000.0;

  std::vector<const FixationSequence*> group(Group g) const;
  std::size_t fixation_count() const;
};

/// Quadrant state 1..4: upper-left, upper-right, lower-left, lower-right.
/// Points on a midline go to the larger index.
int quadrant_of(Point p, const Window& w);

/// Distance from p to the furthest corner of w.
double max_corner_distance(Point p, const Window& w);

/// The corner of w furthest from p.
Point furthest_corner(Point p, const Window& w);

/// Right-continuous step function on [0, domain_end]. The first knot is
/// always at 0.
class StepCurve {
public:
  StepCurve() : StepCurve(0.0, 0.0) {}
  StepCurve(double initial_value, double domain_end);

  /// Sets the value from time t onward. t must not precede the last knot;
  /// a knot at the same time as the last one overwrites it.
  void push(double t, double value);

  double at(double t) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  double domain_end() const { return domain_end_; }
  double final_value() const { return values_.back(); }

private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double domain_end_;
};

}  // namespace fixproc
