#include "fixproc/ingest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

#include "fixproc/csv.hpp"

namespace fixproc {

namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "subject_id", "group", "painting_id", "onset_ms", "duration_ms", "x_px", "y_px"};

enum Col { kSubject, kGroup, kPainting, kOnset, kDuration, kX, kY };

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

ParseResult parse_fixations(std::istream& in, const Window& window, double trial_length_ms) {
  ParseResult result;
  result.dataset.window = window;
  result.dataset.trial_length_ms = trial_length_ms;

  std::string line;
  std::size_t line_no = 0;
  std::array<std::size_t, kColumns.size()> column_of{};
  std::size_t n_columns = 0;

  // Header: first non-empty line.
  while (std::getline(in, line)) {
    ++line_no;
    if (!csv::trim(line).empty()) break;
  }
  if (csv::trim(line).empty()) return result;
  {
    auto fields = csv::split(line);
    n_columns = fields.size();
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      auto it = std::find_if(fields.begin(), fields.end(),
                             [&](std::string_view f) { return csv::trim(f) == kColumns[c]; });
      if (it == fields.end()) {
        fail_line(line_no, "header is missing column '" + std::string(kColumns[c]) + "'");
      }
      column_of[c] = static_cast<std::size_t>(it - fields.begin());
    }
  }

  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::size_t> index_of;
  std::map<std::tuple<std::string, std::string, double>, std::size_t> seen_onsets;
  std::vector<bool> out_of_order;

  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split(line);
    if (fields.size() != n_columns) {
      fail_line(line_no, "expected " + std::to_string(n_columns) + " fields, got " +
                             std::to_string(fields.size()));
    }
    auto text = [&](Col c) { return csv::trim(fields[column_of[c]]); };
    auto number = [&](Col c) {
      auto v = csv::parse_number(text(c));
      if (!v || !std::isfinite(*v)) {
        fail_line(line_no, "bad number in column '" + std::string(kColumns[c]) + "'");
      }
      return *v;
    };

    const std::string subject(text(kSubject));
    const std::string painting(text(kPainting));
    if (subject.empty()) fail_line(line_no, "empty subject_id");
    Group group;
    try {
      group = parse_group(text(kGroup));
    } catch (const DataError& e) {
      fail_line(line_no, e.what());
    }

    Fixation f;
    f.onset_ms = number(kOnset);
    f.duration_ms = number(kDuration);
    f.location = {number(kX), number(kY)};
    if (f.duration_ms < 0.0) fail_line(line_no, "negative duration");

    auto dup_key = std::make_tuple(subject, painting, f.onset_ms);
    if (auto it = seen_onsets.find(dup_key); it != seen_onsets.end()) {
      fail_line(line_no, "duplicate onset for subject " + subject + " (first seen on line " +
                             std::to_string(it->second) + ")");
    }
    seen_onsets.emplace(std::move(dup_key), line_no);

    Key key{subject, painting};
    auto [it, inserted] = index_of.emplace(key, result.dataset.sequences.size());
    if (inserted) {
      FixationSequence s;
      s.subject_id = subject;
      s.group = group;
      s.painting_id = painting;
      result.dataset.sequences.push_back(std::move(s));
      out_of_order.push_back(false);
    }
    auto& seq = result.dataset.sequences[it->second];
    if (seq.group != group) {
      fail_line(line_no, "subject " + subject + " changes group label");
    }
    if (!seq.fixations.empty() && f.onset_ms < seq.fixations.back().onset_ms) {
      out_of_order[it->second] = true;
    }
    seq.fixations.push_back(f);
    ++result.row_count;
  }

  for (std::size_t i = 0; i < result.dataset.sequences.size(); ++i) {
    auto& seq = result.dataset.sequences[i];
    if (out_of_order[i]) {
      std::stable_sort(seq.fixations.begin(), seq.fixations.end(),
                       [](const Fixation& a, const Fixation& b) { return a.onset_ms < b.onset_ms; });
      result.reordered.push_back(seq.subject_id + "/" + seq.painting_id);
    }
  }
  return result;
}

ParseResult parse_fixations(const std::filesystem::path& path, const Window& window,
                            double trial_length_ms) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_fixations(in, window, trial_length_ms);
}

void write_fixations(std::ostream& out, const Dataset& d) {
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    out << (c ? "," : "") << kColumns[c];
  }
  out << '\n';
  for (const auto& s : d.sequences) {
    for (const auto& f : s.fixations) {
      out << s.subject_id << ',' << to_string(s.group) << ',' << s.painting_id << ','
          << csv::format_number(f.onset_ms) << ',' << csv::format_number(f.duration_ms) << ','
          << csv::format_number(f.location.x) << ',' << csv::format_number(f.location.y)
          << '\n';
    }
  }
}

void write_fixations(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_fixations(out, d);
}

FilterResult filter_fixations(const Dataset& d, double min_duration_ms, const Window& w) {
  FilterResult r;
  r.dataset.window = w;
  r.dataset.trial_length_ms = d.trial_length_ms;
  for (const auto& s : d.sequences) {
    FixationSequence kept{s.subject_id, s.group, s.painting_id, {}};
    IngestReport rep{s.subject_id, s.painting_id, s.fixations.size(), 0, 0, 0};
    std::set<std::size_t> excluded;
    for (std::size_t i = 0; i < s.fixations.size(); ++i) {
      const auto& f = s.fixations[i];
      if (f.duration_ms < min_duration_ms) {
        ++rep.n_short_excluded;
        excluded.insert(i);
      } else if (!w.contains(f.location)) {
        ++rep.n_outside_excluded;
        excluded.insert(i);
      } else {
        kept.fixations.push_back(f);
      }
    }
    r.dataset.sequences.push_back(std::move(kept));
    r.reports.push_back(rep);
    r.excluded.push_back(std::move(excluded));
  }
  return r;
}

std::vector<Saccade> derive_saccades(const FixationSequence& s,
                                     const std::set<std::size_t>& exclusions) {
  std::vector<Saccade> out;
  if (s.fixations.size() < 2) return out;
  out.reserve(s.fixations.size() - 1);
  for (std::size_t i = 0; i + 1 < s.fixations.size(); ++i) {
    const auto& a = s.fixations[i];
    const auto& b = s.fixations[i + 1];
    Saccade sac;
    sac.from_index = i;
    sac.to_index = i + 1;
    sac.length_px = distance(a.location, b.location);
    sac.duration_ms = b.onset_ms - a.offset_ms();
    sac.valid = !exclusions.contains(i) && !exclusions.contains(i + 1);
    if (sac.duration_ms < 0.0) {
      throw DataError("subject " + s.subject_id + ": fixations " + std::to_string(i) + " and " +
                      std::to_string(i + 1) + " overlap");
    }
    out.push_back(sac);
  }
  return out;
}

PreparedData prepare(const Dataset& raw, double min_duration_ms) {
  auto filtered = filter_fixations(raw, min_duration_ms, raw.window);
  PreparedData p;
  p.dataset = std::move(filtered.dataset);
  p.reports = std::move(filtered.reports);
  for (std::size_t i = 0; i < raw.sequences.size(); ++i) {
    auto sac = derive_saccades(raw.sequences[i], filtered.excluded[i]);
    p.reports[i].n_saccades_missing = static_cast<std::size_t>(
        std::count_if(sac.begin(), sac.end(), [](const Saccade& s) { return !s.valid; }));
    p.saccades.push_back(std::move(sac));
  }
  return p;
}

PreparedData prepare_filtered(const Dataset& d) {
  PreparedData p;
  p.dataset = d;
  for (const auto& s : d.sequences) {
    p.saccades.push_back(derive_saccades(s));
    p.reports.push_back({s.subject_id, s.painting_id, s.fixations.size(), 0, 0, 0});
  }
  return p;
}

}  // namespace fixproc
