#include "fixproc/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixproc/core.hpp"

namespace fixproc {

namespace {

void check_shape(const CurveMatrix& m) {
  if (m.grid.empty()) throw ConfigError("curve matrix has an empty grid");
  for (const auto& row : m.rows) {
    if (row.size() != m.grid.size()) throw ConfigError("curve length does not match the grid");
  }
}

// Pointwise extreme ranks, one vector per row.
std::vector<std::vector<double>> pointwise_ranks(const CurveMatrix& m) {
  check_shape(m);
  for (const auto& row : m.rows) {
    if (std::any_of(row.begin(), row.end(), [](double v) { return std::isnan(v); })) {
      throw ConfigError("simulated curves must be defined at every grid point");
    }
  }
  const std::size_t s = m.rows.size();
  std::vector<std::vector<double>> ranks(s, std::vector<double>(m.grid.size()));
  std::vector<std::size_t> order(s);
  for (std::size_t t = 0; t < m.grid.size(); ++t) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return m.rows[a][t] < m.rows[b][t]; });
    for (std::size_t i = 0; i < s;) {
      std::size_t j = i;
      while (j + 1 < s && m.rows[order[j + 1]][t] == m.rows[order[i]][t]) ++j;
      // Mid-rank of the tie block, 1-based.
      const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
      const double extreme = std::min(rank, static_cast<double>(s) + 1.0 - rank);
      for (std::size_t q = i; q <= j; ++q) ranks[order[q]][t] = extreme;
      i = j + 1;
    }
  }
  return ranks;
}

}  // namespace

std::vector<double> extreme_ranks(const CurveMatrix& m) {
  std::vector<double> result;
  for (const auto& r : pointwise_ranks(m)) result.push_back(*std::min_element(r.begin(), r.end()));
  return result;
}

RankEnvelope rank_envelope(const CurveMatrix& m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  check_shape(m);
  const std::size_t s = m.rows.size();
  const auto min_s = static_cast<std::size_t>(std::ceil(1.0 / alpha - 1e-9));
  if (s < min_s) {
    throw ConfigError("need at least " + std::to_string(min_s) + " simulated curves, got " +
                      std::to_string(s));
  }

  RankEnvelope e;
  e.grid = m.grid;
  e.alpha = alpha;
  e.extreme_ranks = extreme_ranks(m);

  const double needed = (1.0 - alpha) * static_cast<double>(s) - 1e-9;
  std::size_t k = 1;
  for (std::size_t cand = 2; cand <= (s + 1) / 2; ++cand) {
    const auto count = std::count_if(e.extreme_ranks.begin(), e.extreme_ranks.end(),
                                     [&](double r) { return r >= static_cast<double>(cand); });
    if (static_cast<double>(count) >= needed) {
      k = cand;
    } else {
      break;
    }
  }
  e.k = k;

  e.lower.resize(m.grid.size());
  e.upper.resize(m.grid.size());
  std::vector<double> column(s);
  for (std::size_t t = 0; t < m.grid.size(); ++t) {
    for (std::size_t j = 0; j < s; ++j) column[j] = m.rows[j][t];
    std::sort(column.begin(), column.end());
    e.lower[t] = column[k - 1];
    e.upper[t] = column[s - k];
  }
  return e;
}

std::vector<EnvelopeVerdict> envelope_report(const CurveMatrix& observed, const RankEnvelope& e) {
  check_shape(observed);
  if (observed.grid != e.grid) throw ConfigError("observed curves are not on the envelope grid");
  std::vector<EnvelopeVerdict> out;
  out.reserve(observed.rows.size());
  for (const auto& row : observed.rows) {
    EnvelopeVerdict v;
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (row[t] < e.lower[t] || row[t] > e.upper[t]) {
        v.inside = false;
        v.first_exit_time = e.grid[t];
        break;
      }
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace fixproc
