#pragma once

// Global extreme-rank envelopes for functional summaries of simulated
// realizations.

#include <optional>
#include <span>
#include <vector>

namespace fixproc {

struct CurveMatrix {
  std::vector<double> grid;
  std::vector<std::vector<double>> rows;  // one simulated curve per row
};

struct RankEnvelope {
  std::vector<double> grid;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t k = 1;
  double alpha = 0.05;
  std::vector<double> extreme_ranks;  // R_j per simulated curve
};

/// Extreme rank of every row: the minimum over grid points of the smaller of
/// its mid-rank from below and from above.
std::vector<double> extreme_ranks(const CurveMatrix& m);

/// k is the largest integer with #{j : R_j >= k} >= (1 - alpha) s; the bounds
/// are the pointwise k-th smallest and k-th largest simulated values.
/// Throws ConfigError when s < ceil(1 / alpha) or rows disagree in length.
RankEnvelope rank_envelope(const CurveMatrix& m, double alpha = 0.05);

struct EnvelopeVerdict {
  bool inside = true;
  std::optional<double> first_exit_time;
};

/// Closed-bound check of each observed curve against the envelope. NaN
/// (undefined) observed values never count as a violation.
std::vector<EnvelopeVerdict> envelope_report(const CurveMatrix& observed, const RankEnvelope& e);

}  // namespace fixproc
