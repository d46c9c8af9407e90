#include <cmath>
#include <array>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fixproc/core.hpp"
#include "fixproc/csv.hpp"
#include "fixproc/parallel.hpp"
#include "fixproc/random.hpp"

using namespace fixproc;

TEST_CASE("window validation and geometry") {
  const Window w = Window::reference();
  CHECK(w.width() == 770.0);
  CHECK(w.height() == 768.0);
  CHECK(w.area() == 770.0 * 768.0);
  CHECK(w.contains({0.0, 0.0}));
  CHECK(w.contains({770.0, 768.0}));
  CHECK_FALSE(w.contains({770.5, 10.0}));
  CHECK_THROWS_AS(Window(0, 0, 0, 10), ConfigError);
  CHECK_THROWS_AS(Window(5, 0, 1, 10), ConfigError);
}

TEST_CASE("quadrant_of reference points") {
  const Window w = Window::reference();
  CHECK(quadrant_of({1, 1}, w) == 1);
  CHECK(quadrant_of({769, 767}, w) == 4);
  CHECK(quadrant_of({385, 384}, w) == 4);
  CHECK(quadrant_of({700, 10}, w) == 2);
  CHECK(quadrant_of({10, 700}, w) == 3);
  CHECK_THROWS_AS(quadrant_of({-1, 10}, w), DataError);
}

TEST_CASE("quadrant_of tiles the window into four half-open cells") {
  // Exhaustive scan on a coarse lattice: every point gets exactly the cell
  // given by the >= midline rule.
  const Window w(0, 0, 10, 8);
  for (int x = 0; x <= 10; ++x) {
    for (int y = 0; y <= 8; ++y) {
      const int expected = 1 + (x >= 5 ? 1 : 0) + (y >= 4 ? 2 : 0);
      CHECK(quadrant_of({double(x), double(y)}, w) == expected);
    }
  }
}

TEST_CASE("max_corner_distance") {
  const Window unit(0, 0, 1, 1);
  CHECK(max_corner_distance({0.5, 0.5}, unit) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(max_corner_distance({0.0, 0.0}, unit) == doctest::Approx(std::sqrt(2.0)));
  const double d = max_corner_distance({100, 100}, Window::reference());
  CHECK(d == doctest::Approx(std::sqrt(670.0 * 670.0 + 668.0 * 668.0)));
  CHECK(d == doctest::Approx(946.11).epsilon(1e-5));
  const Point c = furthest_corner({100, 100}, Window::reference());
  CHECK(c.x == 770.0);
  CHECK(c.y == 768.0);
}

TEST_CASE("StepCurve is right-continuous") {
  StepCurve c(0.0, 10.0);
  c.push(2.0, 1.0);
  c.push(5.0, 3.0);
  CHECK(c.at(0.0) == 0.0);
  CHECK(c.at(1.999) == 0.0);
  CHECK(c.at(2.0) == 1.0);
  CHECK(c.at(4.9) == 1.0);
  CHECK(c.at(5.0) == 3.0);
  CHECK(c.at(10.0) == 3.0);
  CHECK(c.final_value() == 3.0);
  c.push(5.0, 4.0);
  CHECK(c.at(5.0) == 4.0);
  CHECK(c.knots().size() == 3);
  CHECK_THROWS(c.push(1.0, 2.0));
}

TEST_CASE("validate_sequence rejects overlap and unordered onsets") {
  FixationSequence s{"a", Group::novice, "p", {{{1, 1}, 0, 100}, {{2, 2}, 150, 50}}};
  CHECK_NOTHROW(validate_sequence(s));
  s.fixations[1].onset_ms = 90;
  CHECK_THROWS_AS(validate_sequence(s), DataError);
}

TEST_CASE("group names round trip") {
  CHECK(parse_group(to_string(Group::novice)) == Group::novice);
  CHECK(parse_group(to_string(Group::non_novice)) == Group::non_novice);
  CHECK_THROWS_AS(parse_group("expert"), DataError);
}

TEST_CASE("rng streams are reproducible and distinct") {
  auto a = Rng::stream(7, "simulate", 3);
  auto b = Rng::stream(7, "simulate", 3);
  auto c = Rng::stream(7, "simulate", 4);
  auto d = Rng::stream(7, "permutation", 3);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("rng uniform lies strictly inside (0, 1) and below is unbiased") {
  auto r = Rng::stream(1, "t");
  double sum = 0.0;
  std::array<int, 5> counts{};
  for (int i = 0; i < 50000; ++i) {
    const double u = r.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
    ++counts[r.below(5)];
  }
  CHECK(sum / 50000 == doctest::Approx(0.5).epsilon(0.01));
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("shuffle is a permutation") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto r = Rng::stream(3, "shuffle");
  shuffle(std::span<int>(v), r);
  std::set<int> s(v.begin(), v.end());
  CHECK(s.size() == 50);
  CHECK(*s.begin() == 0);
  CHECK(*s.rbegin() == 49);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, [](std::size_t i) {
    if (i == 7) throw DataError("boom");
  }));
}

TEST_CASE("csv number formatting round trips") {
  for (double v : {0.0, 1.5, -3.25, 123456.789, 1e-300, 0.1}) {
    CHECK(*csv::parse_number(csv::format_number(v)) == v);
  }
}
