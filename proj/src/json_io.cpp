#include "fixproc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "fixproc/csv.hpp"

namespace fixproc {

namespace {

// NaN and infinities have no JSON literal; they become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

void to_json(json& j, const Window& w) {
  j = {{"x_min", w.x_min()}, {"y_min", w.y_min()}, {"x_max", w.x_max()}, {"y_max", w.y_max()}};
}

void from_json(const json& j, Window& w) {
  if (j.is_array()) {
    if (j.size() != 4) throw ConfigError("window array must have four entries");
    w = Window(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
    return;
  }
  w = Window(j.at("x_min").get<double>(), j.at("y_min").get<double>(), j.at("x_max").get<double>(),
             j.at("y_max").get<double>());
}

void to_json(json& j, const IngestReport& r) {
  j = {{"subject_id", r.subject_id},
       {"painting_id", r.painting_id},
       {"n_total", r.n_total},
       {"n_short_excluded", r.n_short_excluded},
       {"n_outside_excluded", r.n_outside_excluded},
       {"n_saccades_missing", r.n_saccades_missing}};
}

void to_json(json& j, const GammaFit& g) {
  j = {{"shape", g.shape}, {"rate", g.rate}, {"n", g.n}, {"source", to_string(g.source)}};
}

void from_json(const json& j, GammaFit& g) {
  g.shape = j.at("shape").get<double>();
  g.rate = j.at("rate").get<double>();
  g.n = j.value("n", std::size_t{0});
  g.source = parse_gamma_source(j.value("source", std::string("other")));
}

void to_json(json& j, const QuadratTestResult& r) {
  j = {{"statistic", r.statistic}, {"df", r.df},          {"p", r.p},
       {"q", r.q},                 {"counts", r.counts}, {"warnings", r.warnings}};
}

void to_json(json& j, const ShiftCurve& s) {
  j = {{"alpha", s.alpha},
       {"band_halfwidth", s.band_halfwidth},
       {"zero_inside", s.zero_inside()},
       {"abscissae", numbers(s.abscissae)},
       {"delta", numbers(s.delta)},
       {"lower", numbers(s.lower)},
       {"upper", numbers(s.upper)}};
}

void to_json(json& j, const FisherResult& r) { j = {{"chi2", r.chi2}, {"df", r.df}, {"p", r.p}}; }

void to_json(json& j, const QQBand& q) {
  j = {{"alpha", q.alpha},
       {"halfwidth", q.halfwidth},
       {"inside", q.inside()},
       {"theoretical", numbers(q.theoretical)},
       {"empirical", numbers(q.empirical)},
       {"lower", numbers(q.lower)},
       {"upper", numbers(q.upper)}};
}

void to_json(json& j, const StepCurve& c) {
  j = {{"knots", numbers(c.knots())}, {"values", numbers(c.values())}, {"domain_end", c.domain_end()}};
}

void to_json(json& j, const RankEnvelope& e) {
  j = {{"alpha", e.alpha},
       {"k", e.k},
       {"grid", numbers(e.grid)},
       {"lower", numbers(e.lower)},
       {"upper", numbers(e.upper)}};
}

void to_json(json& j, const EnvelopeVerdict& v) {
  j = {{"inside", v.inside},
       {"first_exit_time", v.first_exit_time ? json(*v.first_exit_time) : json(nullptr)}};
}

json grid_json(const IntensityGrid& g) {
  return {{"window", g.geometry.window},
          {"nx", g.geometry.nx},
          {"ny", g.geometry.ny},
          {"bandwidth", g.bandwidth},
          {"integral", g.integral()},
          {"values", numbers(g.values)}};
}

json grid_json(const ScalarGrid& g) {
  return {{"window", g.geometry.window},
          {"nx", g.geometry.nx},
          {"ny", g.geometry.ny},
          {"values", numbers(g.values)}};
}

json ratio_test_json(const RatioTestResult& r, bool include_grid) {
  json j = {{"T0", r.t0}, {"p", r.p},   {"m", r.m},   {"k", r.k},
            {"h1", r.h1}, {"h2", r.h2}, {"n1", r.n1}, {"n2", r.n2}};
  if (include_grid) j["r_grid"] = grid_json(r.r_grid);
  return j;
}

json transitions_json(const TransitionCurves& t) {
  json j = json::object();
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      const std::string key = std::to_string(a + 1) + "->" + std::to_string(b + 1);
      j[key] = t.curves[a][b];
      j[key]["count"] = t.counts[a][b];
    }
  }
  return j;
}

json model_json(const FixationModel& m) {
  return {{"group", to_string(m.group)},
          {"painting_id", m.painting_id},
          {"window", m.window},
          {"trial_length_ms", m.trial_length_ms},
          {"bandwidth_all", m.intensity_all.bandwidth},
          {"bandwidth_first", m.intensity_first.bandwidth},
          {"nx", m.intensity_all.geometry.nx},
          {"ny", m.intensity_all.geometry.ny},
          {"dur_fix", m.dur_fix},
          {"dur_sac", m.dur_sac},
          {"len_sac", m.len_sac},
          {"p_long", m.p_long},
          {"n_angles", m.n_angles},
          {"min_fixation_ms", m.min_fixation_ms}};
}

json provenance_json(const std::vector<SimRun>& runs) {
  json a = json::array();
  for (const auto& r : runs) {
    json kinds = json::array();
    std::size_t long_jumps = 0;
    for (auto k : r.jump_provenance) {
      kinds.push_back(to_string(k));
      if (k == JumpKind::uniform_long) ++long_jumps;
    }
    a.push_back({{"subject_id", r.sequence.subject_id},
                 {"fixations", r.sequence.fixations.size()},
                 {"long_jumps", long_jumps},
                 {"last_clipped", r.last_clipped},
                 {"jumps", std::move(kinds)}});
  }
  return a;
}

void write_grid_csv(std::ostream& out, const GridGeometry& g, std::span<const double> values) {
  out << "cx,cy,value\n";
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      out << csv::format_number(g.center_x(ix)) << ',' << csv::format_number(g.center_y(iy)) << ','
          << csv::format_number(values[g.index(ix, iy)]) << '\n';
    }
  }
}

void write_curve_csv(std::ostream& out, const StepCurve& c) {
  out << "time,value\n";
  for (std::size_t i = 0; i < c.knots().size(); ++i) {
    out << csv::format_number(c.knots()[i]) << ',' << csv::format_number(c.values()[i]) << '\n';
  }
}

void write_envelope_csv(std::ostream& out, const RankEnvelope& e) {
  out << "time,lower,upper\n";
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    out << csv::format_number(e.grid[i]) << ',' << csv::format_number(e.lower[i]) << ','
        << csv::format_number(e.upper[i]) << '\n';
  }
}

void write_qq_csv(std::ostream& out, const QQBand& q) {
  out << "theoretical,empirical,lower,upper\n";
  for (std::size_t i = 0; i < q.empirical.size(); ++i) {
    out << csv::format_number(q.theoretical[i]) << ',' << csv::format_number(q.empirical[i]) << ','
        << csv::format_number(q.lower[i]) << ',' << csv::format_number(q.upper[i]) << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace fixproc
