#pragma once

// Fixation-event CSV input, exclusion rules, and saccade derivation.
//
// Canonical CSV schema (header required, column order free on input):
//   subject_id,group,painting_id,onset_ms,duration_ms,x_px,y_px
// with group in {novice, non_novice}.

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "fixproc/core.hpp"

namespace fixproc {

struct ParseResult {
  Dataset dataset;
  std::size_t row_count = 0;
  /// "subject/painting" keys whose rows were not in onset order in the file.
  std::vector<std::string> reordered;
};

/// Parses the canonical CSV. One sequence per (subject_id, painting_id),
/// in order of first appearance; fixations sorted by onset.
/// Throws DataError with the offending line number on malformed rows and on
/// duplicate (subject, painting, onset) keys.
ParseResult parse_fixations(std::istream& in, const Window& window = Window::reference(),
                            double trial_length_ms = 180000.0);
ParseResult parse_fixations(const std::filesystem::path& path,
                            const Window& window = Window::reference(),
                            double trial_length_ms = 180000.0);

/// Writes sequences in canonical column order with shortest round-trip
/// number formatting.
void write_fixations(std::ostream& out, const Dataset& d);
void write_fixations(const std::filesystem::path& path, const Dataset& d);

struct IngestReport {
  std::string subject_id;
  std::string painting_id;
  std::size_t n_total = 0;
  std::size_t n_short_excluded = 0;
  std::size_t n_outside_excluded = 0;
  std::size_t n_saccades_missing = 0;
};

struct FilterResult {
  Dataset dataset;
  std::vector<IngestReport> reports;          // parallel to dataset.sequences
  std::vector<std::set<std::size_t>> excluded;  // original indices, per sequence
};

/// Drops fixations shorter than min_duration_ms (strict: exactly
/// min_duration_ms is kept) and fixations outside w. A fixation failing both
/// rules is counted as short.
FilterResult filter_fixations(const Dataset& d, double min_duration_ms, const Window& w);

/// One saccade per consecutive pair of the original sequence s. A saccade
/// touching an excluded index is marked invalid (missing); excluded fixations
/// are never spliced over. Throws DataError on overlapping fixations.
std::vector<Saccade> derive_saccades(const FixationSequence& s,
                                     const std::set<std::size_t>& exclusions = {});

/// Filtered data with saccades and per-subject bookkeeping.
struct PreparedData {
  Dataset dataset;                             // filtered
  std::vector<std::vector<Saccade>> saccades;  // parallel to dataset.sequences
  std::vector<IngestReport> reports;
};

/// filter_fixations followed by derive_saccades on the unfiltered sequences.
PreparedData prepare(const Dataset& raw, double min_duration_ms = 40.0);

/// Treats d as already filtered: saccades between all consecutive pairs.
PreparedData prepare_filtered(const Dataset& d);

}  // namespace fixproc
