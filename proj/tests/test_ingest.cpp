#include <sstream>

#include "doctest.h"
#include "fixproc/ingest.hpp"

using namespace fixproc;

namespace {

const char* kHeader = "subject_id,group,painting_id,onset_ms,duration_ms,x_px,y_px\n";

ParseResult parse(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_fixations(in);
}

FixationSequence sequence(std::vector<Fixation> f) {
  return FixationSequence{"s1", Group::novice, "p", std::move(f)};
}

}  // namespace

TEST_CASE("two rows from one subject give one sequence") {
  const auto r = parse("s1,novice,p,0,200,10,20\ns1,novice,p,250,100,30,40\n");
  REQUIRE(r.dataset.sequences.size() == 1);
  CHECK(r.dataset.sequences[0].fixations.size() == 2);
  CHECK(r.dataset.sequences[0].fixations[1].location.x == 30.0);
  CHECK(r.row_count == 2);
  CHECK(r.reordered.empty());
}

TEST_CASE("header-only file gives an empty dataset") {
  const auto r = parse("");
  CHECK(r.dataset.sequences.empty());
  CHECK(r.row_count == 0);
}

TEST_CASE("columns may come in any order") {
  std::istringstream in("x_px,y_px,onset_ms,duration_ms,subject_id,group,painting_id\n1,2,0,50,a,non_novice,p\n");
  const auto r = parse_fixations(in);
  REQUIRE(r.dataset.sequences.size() == 1);
  CHECK(r.dataset.sequences[0].group == Group::non_novice);
  CHECK(r.dataset.sequences[0].fixations[0].location.y == 2.0);
}

TEST_CASE("rows out of time order are sorted and reported") {
  const auto shuffled = parse("s1,novice,p,500,100,3,3\ns1,novice,p,0,100,1,1\ns1,novice,p,200,100,2,2\n");
  const auto sorted = parse("s1,novice,p,0,100,1,1\ns1,novice,p,200,100,2,2\ns1,novice,p,500,100,3,3\n");
  CHECK(shuffled.dataset.sequences[0].fixations == sorted.dataset.sequences[0].fixations);
  CHECK(shuffled.reordered.size() == 1);
  CHECK(sorted.reordered.empty());
}

TEST_CASE("malformed rows name their line") {
  try {
    parse("s1,novice,p,0,100,1,1\ns1,novice,p,abc,100,1,1\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("s1,novice,p,0,100,1\n"), DataError);
  CHECK_THROWS_AS(parse("s1,expert,p,0,100,1,1\n"), DataError);
  std::istringstream missing("subject_id,group,onset_ms\n");
  CHECK_THROWS_AS(parse_fixations(missing), DataError);
}

TEST_CASE("duplicate onsets within a subject are rejected") {
  CHECK_THROWS_AS(parse("s1,novice,p,0,100,1,1\ns1,novice,p,0,80,2,2\n"), DataError);
}

TEST_CASE("write then parse round trips") {
  const auto r = parse("s1,novice,p,0,200.5,10.25,20\ns2,non_novice,p,30,100,700,40\n");
  std::ostringstream out;
  write_fixations(out, r.dataset);
  std::istringstream in(out.str());
  const auto again = parse_fixations(in);
  REQUIRE(again.dataset.sequences.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(again.dataset.sequences[i].fixations == r.dataset.sequences[i].fixations);
    CHECK(again.dataset.sequences[i].subject_id == r.dataset.sequences[i].subject_id);
    CHECK(again.dataset.sequences[i].group == r.dataset.sequences[i].group);
  }
}

TEST_CASE("filter keeps valid data unchanged") {
  Dataset d;
  d.sequences.push_back(sequence({{{1, 1}, 0, 100}, {{2, 2}, 120, 40}}));
  const auto f = filter_fixations(d, 40.0, d.window);
  CHECK(f.dataset.sequences[0].fixations == d.sequences[0].fixations);
  CHECK(f.reports[0].n_short_excluded == 0);
  CHECK(f.reports[0].n_outside_excluded == 0);
  CHECK(f.reports[0].n_total == 2);
}

TEST_CASE("a 39 ms fixation is short, 40 ms is kept") {
  Dataset d;
  d.sequences.push_back(sequence({{{1, 1}, 0, 39}, {{2, 2}, 100, 40}}));
  const auto f = filter_fixations(d, 40.0, d.window);
  CHECK(f.dataset.sequences[0].fixations.size() == 1);
  CHECK(f.reports[0].n_short_excluded == 1);
  CHECK(f.excluded[0] == std::set<std::size_t>{0});
}

TEST_CASE("a fixation beyond the window width is outside") {
  Dataset d;
  d.sequences.push_back(sequence({{{780, 10}, 0, 100}, {{2, 2}, 200, 100}}));
  const auto f = filter_fixations(d, 40.0, d.window);
  CHECK(f.reports[0].n_outside_excluded == 1);
  CHECK(f.dataset.sequences[0].fixations.size() == 1);
}

TEST_CASE("saccade geometry and timing") {
  const auto s = sequence({{{0, 0}, 0, 100}, {{3, 4}, 120, 100}});
  const auto sac = derive_saccades(s);
  REQUIRE(sac.size() == 1);
  CHECK(sac[0].length_px == doctest::Approx(5.0));
  CHECK(sac[0].duration_ms == doctest::Approx(20.0));
  CHECK(sac[0].valid);
}

TEST_CASE("excluded middle fixation invalidates both adjacent saccades") {
  const auto s = sequence({{{0, 0}, 0, 100}, {{3, 4}, 120, 20}, {{6, 8}, 160, 100}});
  const auto sac = derive_saccades(s, {1});
  REQUIRE(sac.size() == 2);
  CHECK_FALSE(sac[0].valid);
  CHECK_FALSE(sac[1].valid);

  Dataset d;
  d.sequences.push_back(s);
  const auto p = prepare(d, 40.0);
  CHECK(p.reports[0].n_saccades_missing == 2);
  CHECK(p.dataset.sequences[0].fixations.size() == 2);
}

TEST_CASE("single fixation has no saccades; overlap is an error") {
  CHECK(derive_saccades(sequence({{{0, 0}, 0, 100}})).empty());
  CHECK_THROWS_AS(derive_saccades(sequence({{{0, 0}, 0, 100}, {{1, 1}, 50, 100}})), DataError);
}
