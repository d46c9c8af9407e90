#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixproc/random.hpp"
#include "fixproc/summaries.hpp"

using namespace fixproc;

namespace {

FixationSequence path(std::vector<Point> pts, double step = 300.0) {
  FixationSequence s{"s", Group::novice, "p", {}};
  for (std::size_t i = 0; i < pts.size(); ++i) s.fixations.push_back({pts[i], step * i, 200.0});
  return s;
}

std::vector<Point> random_points(std::size_t n, Rng& rng, double lo = 0.0, double hi = 700.0) {
  std::vector<Point> p(n);
  for (auto& q : p) q = {rng.uniform(lo, hi), rng.uniform(lo, hi)};
  return p;
}

// Hull area by exhaustive enumeration: an ordered pair (i, j) is a hull edge
// when no point lies strictly to its right. The hull vertices are then ordered
// by angle around their centroid and the polygon area is summed.
double hull_area_brute(const std::vector<Point>& p) {
  const std::size_t n = p.size();
  std::vector<Point> verts;
  auto cross = [](Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool edge = true;
      for (std::size_t k = 0; k < n && edge; ++k) {
        if (k != i && k != j && cross(p[i], p[j], p[k]) < 0.0) edge = false;
      }
      if (edge) verts.push_back(p[i]);
    }
  }
  if (verts.size() < 3) return 0.0;
  Point c{0, 0};
  for (const auto& v : verts) c = {c.x + v.x / verts.size(), c.y + v.y / verts.size()};
  std::sort(verts.begin(), verts.end(), [&](Point a, Point b) {
    return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
  });
  double area = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Point a = verts[i], b = verts[(i + 1) % verts.size()];
    area += a.x * b.y - b.x * a.y;
  }
  return std::abs(area) / 2.0;
}

double linear_scan(const StepCurve& c, double t) {
  double v = c.values().front();
  for (std::size_t i = 0; i < c.knots().size(); ++i) {
    if (c.knots()[i] <= t) v = c.values()[i];
  }
  return v;
}

}  // namespace

TEST_CASE("hull coverage examples") {
  const Window w = Window::reference();
  const auto s = path({{0, 0}, {10, 0}, {0, 10}});
  const auto c = convex_hull_coverage(s, w, 1000.0);
  CHECK(c.at(0.0) == 0.0);
  CHECK(c.at(300.0) == 0.0);
  CHECK(c.at(600.0) == doctest::Approx(50.0 / (770.0 * 768.0)));
  CHECK(c.at(600.0) == doctest::Approx(8.456e-5).epsilon(1e-3));

  const auto corners = path({{0, 0}, {770, 0}, {770, 768}, {0, 768}, {100, 100}});
  const auto cc = convex_hull_coverage(corners, w, 2000.0);
  CHECK(cc.at(900.0) == doctest::Approx(1.0));
  CHECK(cc.at(2000.0) == doctest::Approx(1.0));

  const auto line = path({{0, 0}, {10, 10}, {20, 20}, {30, 30}});
  CHECK(convex_hull_coverage(line, w, 2000.0).final_value() == 0.0);
}

TEST_CASE("hull area matches exhaustive enumeration") {
  auto rng = Rng::stream(1, "hull");
  for (int rep = 0; rep < 300; ++rep) {
    const auto n = 3 + rng.below(10);
    const auto pts = random_points(n, rng);
    const double fast = polygon_area(convex_hull(pts));
    CHECK(std::abs(fast - hull_area_brute(pts)) < 1e-9 * std::max(1.0, fast));
  }
}

TEST_CASE("hull area does not depend on insertion order") {
  auto rng = Rng::stream(2, "order");
  auto pts = random_points(40, rng);
  const double a = polygon_area(convex_hull(pts));
  for (int rep = 0; rep < 20; ++rep) {
    shuffle(std::span<Point>(pts), rng);
    CHECK(polygon_area(convex_hull(pts)) == doctest::Approx(a).epsilon(1e-12));
    CHECK(convex_hull_coverage(path(pts), Window::reference(), 20000.0).final_value() ==
          doctest::Approx(a / Window::reference().area()).epsilon(1e-12));
  }
}

TEST_CASE("ball union coverage examples") {
  const Window w = Window::reference();
  const auto one = path({{385, 384}});
  const double disc = std::numbers::pi * 35.0 * 35.0 / (770.0 * 768.0);
  const auto c = ball_union_coverage(one, w, 1000.0, 35.0, 1.0);
  CHECK(c.final_value() == doctest::Approx(disc).epsilon(0.01));
  CHECK(c.final_value() == doctest::Approx(6.508e-3).epsilon(0.01));

  const auto twice = path({{385, 384}, {385, 384}});
  const auto c2 = ball_union_coverage(twice, w, 1000.0, 35.0, 1.0);
  CHECK(c2.at(300.0) == c2.at(0.0));

  std::vector<Point> dense;
  for (double x = 10; x < 770; x += 30) {
    for (double y = 10; y < 768; y += 30) dense.push_back({x, y});
  }
  CHECK(ball_union_coverage(path(dense, 10.0), w, 1e5, 35.0, 2.0).final_value() == doctest::Approx(1.0));
  CHECK_THROWS_AS(ball_union_coverage(one, w, 1000.0, 35.0, 40.0), ConfigError);
}

TEST_CASE("coverage curves are monotone and bounded") {
  auto rng = Rng::stream(3, "monotone");
  const Window w = Window::reference();
  const auto s = path(random_points(60, rng, 0.0, 768.0));
  for (const auto& c : {convex_hull_coverage(s, w, 20000.0), ball_union_coverage(s, w, 20000.0, 35.0, 2.0)}) {
    for (std::size_t i = 0; i < c.values().size(); ++i) {
      CHECK(c.values()[i] >= 0.0);
      CHECK(c.values()[i] <= 1.0);
      if (i > 0) CHECK(c.values()[i] >= c.values()[i - 1]);
    }
  }
}

TEST_CASE("scanpath length") {
  CHECK(scanpath_length(path({{5, 5}}), 100.0).final_value() == 0.0);
  const auto l = scanpath_length(path({{0, 0}, {3, 4}, {3, 4}}), 1000.0);
  CHECK(l.at(0.0) == 0.0);
  CHECK(l.at(299.0) == 0.0);
  CHECK(l.at(300.0) == doctest::Approx(5.0));
  CHECK(l.at(1000.0) == doctest::Approx(5.0));

  auto rng = Rng::stream(4, "scan");
  const auto pts = random_points(100, rng);
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    total += std::sqrt((pts[i].x - pts[i - 1].x) * (pts[i].x - pts[i - 1].x) +
                       (pts[i].y - pts[i - 1].y) * (pts[i].y - pts[i - 1].y));
  }
  const auto s = scanpath_length(path(pts), 40000.0);
  CHECK(std::abs(s.final_value() - total) < 1e-9);
  // Additivity over (t1, t2].
  const double t1 = 3000.0, t2 = 9000.0;
  double part = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double onset = 300.0 * i;
    if (onset > t1 && onset <= t2) part += distance(pts[i - 1], pts[i]);
  }
  CHECK(s.at(t2) - s.at(t1) == doctest::Approx(part));
}

TEST_CASE("transition curves in one quadrant") {
  const Window w = Window::reference();
  const auto t = transition_curves(path({{10, 10}, {20, 20}, {30, 30}, {40, 40}}), w, 2000.0);
  CHECK(t.curves[0][0].final_value() == 1.0);
  for (int b = 1; b < 4; ++b) CHECK(t.curves[0][b].final_value() == 0.0);
  for (int a = 1; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) CHECK(std::isnan(t.curves[a][b].final_value()));
  }
  CHECK(t.counts[0][0] == 3);
  CHECK_THROWS_AS(transition_curves(path({{1, 1}}), w, 100.0), DataError);
}

TEST_CASE("alternating quadrants") {
  std::vector<Point> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(i % 2 ? Point{700, 10} : Point{10, 10});
  const auto t = transition_curves(path(pts), Window::reference(), 10000.0);
  CHECK(t.curves[0][1].final_value() == 1.0);
  CHECK(t.curves[1][0].final_value() == 1.0);
}

TEST_CASE("scripted path matches a hand-counted table") {
  // Quadrant path: 1 2 4 3 1 1 4 2 2 3
  const Point q[5] = {{}, {100, 100}, {600, 100}, {100, 600}, {600, 600}};
  const int seq[10] = {1, 2, 4, 3, 1, 1, 4, 2, 2, 3};
  std::vector<Point> pts;
  for (int s : seq) pts.push_back(q[s]);
  const auto t = transition_curves(path(pts), Window::reference(), 5000.0);
  // Transitions: 1>2 2>4 4>3 3>1 1>1 1>4 4>2 2>2 2>3
  const std::size_t expected[4][4] = {{1, 1, 0, 1}, {0, 1, 1, 1}, {1, 0, 0, 0}, {0, 1, 1, 0}};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) CHECK(t.counts[a][b] == expected[a][b]);
  }
  CHECK(t.row_counts[0] == 3);
  CHECK(t.curves[0][1].final_value() == doctest::Approx(1.0 / 3.0));
  // Value of P(1->4) right after the transition 1>1 at the sixth onset.
  CHECK(t.curves[0][3].at(1500.0) == 0.0);
  CHECK(t.curves[0][0].at(1500.0) == doctest::Approx(0.5));
}

TEST_CASE("transition rows sum to one at every knot") {
  auto rng = Rng::stream(5, "rows");
  const auto s = path(random_points(80, rng, 0.0, 768.0));
  const auto t = transition_curves(s, Window::reference(), 30000.0);
  for (const auto& f : s.fixations) {
    for (int a = 0; a < 4; ++a) {
      const double first = t.curves[a][0].at(f.onset_ms);
      if (std::isnan(first)) continue;
      double sum = 0.0;
      for (int b = 0; b < 4; ++b) sum += t.curves[a][b].at(f.onset_ms);
      CHECK(sum == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("resample_curve") {
  StepCurve flat(2.5, 100.0);
  for (double v : resample_curve(flat, uniform_grid(0, 100, 11))) CHECK(v == 2.5);

  StepCurve c(0.0, 100.0);
  c.push(10.0, 1.0);
  const std::vector<double> at_knot = {10.0};
  CHECK(resample_curve(c, at_knot)[0] == 1.0);

  auto rng = Rng::stream(6, "resample");
  StepCurve r(rng.uniform(), 1000.0);
  double t = 0.0;
  for (int i = 0; i < 200; ++i) {
    t += rng.uniform(0.0, 5.0);
    r.push(t, rng.uniform());
  }
  const auto grid = uniform_grid(0.0, 1000.0, 777);
  const auto v = resample_curve(r, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(v[i] == linear_scan(r, grid[i]));
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1000.0);
}
