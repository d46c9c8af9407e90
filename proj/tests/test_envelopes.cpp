#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixproc/envelopes.hpp"
#include "fixproc/random.hpp"
#include "fixproc/summaries.hpp"

using namespace fixproc;

namespace {

CurveMatrix random_walks(std::size_t s, std::size_t points, Rng& rng) {
  CurveMatrix m{uniform_grid(0.0, 1.0, points), {}};
  for (std::size_t j = 0; j < s; ++j) {
    std::vector<double> row(points);
    double v = 0.0;
    for (auto& x : row) x = (v += rng.uniform(-1.0, 1.0));
    m.rows.push_back(std::move(row));
  }
  return m;
}

// Mid-rank from below of value v among column values: #{< v} + (#{== v} + 1) / 2.
double brute_extreme_rank(const CurveMatrix& m, std::size_t j) {
  const double s = static_cast<double>(m.rows.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < m.grid.size(); ++t) {
    double less = 0.0, equal = 0.0;
    for (const auto& r : m.rows) {
      less += r[t] < m.rows[j][t];
      equal += r[t] == m.rows[j][t];
    }
    const double below = less + (equal + 1.0) / 2.0;
    best = std::min({best, below, s + 1.0 - below});
  }
  return best;
}

}  // namespace

TEST_CASE("identical curves give a degenerate envelope") {
  CurveMatrix m{{0.0, 1.0, 2.0}, std::vector<std::vector<double>>(25, {1.0, 4.0, 9.0})};
  const auto e = rank_envelope(m);
  CHECK(e.lower == std::vector<double>{1.0, 4.0, 9.0});
  CHECK(e.upper == e.lower);
  CHECK(e.k >= 1);
}

TEST_CASE("s = 20 at 5% gives k = 1 and min/max bounds") {
  auto rng = Rng::stream(1, "k");
  const auto m = random_walks(20, 50, rng);
  const auto e = rank_envelope(m, 0.05);
  CHECK(e.k == 1);
  for (std::size_t t = 0; t < m.grid.size(); ++t) {
    double lo = m.rows[0][t], hi = lo;
    for (const auto& r : m.rows) {
      lo = std::min(lo, r[t]);
      hi = std::max(hi, r[t]);
    }
    CHECK(e.lower[t] == lo);
    CHECK(e.upper[t] == hi);
  }
  CHECK_THROWS_AS(rank_envelope(random_walks(19, 10, rng), 0.05), ConfigError);
}

TEST_CASE("extreme ranks match brute-force mid-ranks") {
  auto rng = Rng::stream(2, "ranks");
  auto m = random_walks(40, 30, rng);
  // Introduce ties.
  for (auto& r : m.rows) r[0] = 0.0;
  for (std::size_t j = 0; j < 10; ++j) m.rows[j][5] = 1.0;
  const auto ranks = extreme_ranks(m);
  for (std::size_t j = 0; j < m.rows.size(); ++j) CHECK(ranks[j] == doctest::Approx(brute_extreme_rank(m, j)));
}

TEST_CASE("k selection rule") {
  auto rng = Rng::stream(3, "rule");
  const auto m = random_walks(200, 100, rng);
  const auto e = rank_envelope(m, 0.05);
  auto frac = [&](double k) {
    double c = 0.0;
    for (double r : e.extreme_ranks) c += r >= k;
    return c / 200.0;
  };
  CHECK(frac(double(e.k)) >= 0.95);
  CHECK(frac(double(e.k + 1)) < 0.95);
}

TEST_CASE("99% envelope contains the 95% envelope and bounds are attained") {
  auto rng = Rng::stream(4, "nested");
  const auto m = random_walks(200, 80, rng);
  const auto e95 = rank_envelope(m, 0.05);
  const auto e99 = rank_envelope(m, 0.01);
  for (std::size_t t = 0; t < m.grid.size(); ++t) {
    CHECK(e99.lower[t] <= e95.lower[t]);
    CHECK(e99.upper[t] >= e95.upper[t]);
    CHECK(e95.lower[t] <= e95.upper[t]);
    bool lo = false, hi = false;
    for (const auto& r : m.rows) {
      lo |= r[t] == e95.lower[t];
      hi |= r[t] == e95.upper[t];
    }
    CHECK(lo);
    CHECK(hi);
  }
}

TEST_CASE("envelope report") {
  CurveMatrix sims{{0.0, 1.0, 2.0}, {}};
  for (int j = 0; j < 20; ++j) sims.rows.push_back({double(j), double(j), double(j)});
  const auto e = rank_envelope(sims);
  CurveMatrix obs{sims.grid, {e.lower, {5.0, 25.0, 5.0}, {5.0, 5.0, 5.0}}};
  const auto v = envelope_report(obs, e);
  CHECK(v[0].inside);
  CHECK_FALSE(v[0].first_exit_time);
  CHECK_FALSE(v[1].inside);
  CHECK(*v[1].first_exit_time == 1.0);
  CHECK(v[2].inside);

  CurveMatrix bad{{0.0, 1.0}, {{1.0, 1.0}}};
  CHECK_THROWS_AS(envelope_report(bad, e), ConfigError);
}

TEST_CASE("NaN in simulated curves is rejected") {
  CurveMatrix m{{0.0, 1.0}, std::vector<std::vector<double>>(20, {0.0, 1.0})};
  m.rows[3][1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(rank_envelope(m));
}

TEST_CASE("fresh same-law curves are covered near the nominal rate") {
  // Small version of the calibration check; the full one runs in the
  // acceptance suite.
  auto rng = Rng::stream(5, "coverage");
  int inside = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    const auto m = random_walks(201, 60, rng);
    CurveMatrix sims{m.grid, {m.rows.begin(), m.rows.end() - 1}};
    CurveMatrix fresh{m.grid, {m.rows.back()}};
    inside += envelope_report(fresh, rank_envelope(sims))[0].inside;
  }
  CHECK(inside >= 0.88 * trials);
}
