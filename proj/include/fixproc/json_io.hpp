#pragma once

// JSON and CSV forms of the module results.

#include <filesystem>
#include <iosfwd>
#include <span>

#include "json.hpp"

#include "fixproc/compare.hpp"
#include "fixproc/core.hpp"
#include "fixproc/density.hpp"
#include "fixproc/envelopes.hpp"
#include "fixproc/fitdist.hpp"
#include "fixproc/ingest.hpp"
#include "fixproc/simulate.hpp"
#include "fixproc/summaries.hpp"

namespace fixproc {

using nlohmann::json;

void to_json(json& j, const Window& w);
void from_json(const json& j, Window& w);
void to_json(json& j, const IngestReport& r);
void to_json(json& j, const GammaFit& g);
void from_json(const json& j, GammaFit& g);
void to_json(json& j, const QuadratTestResult& r);
void to_json(json& j, const ShiftCurve& s);
void to_json(json& j, const FisherResult& r);
void to_json(json& j, const QQBand& q);
void to_json(json& j, const StepCurve& c);
void to_json(json& j, const RankEnvelope& e);
void to_json(json& j, const EnvelopeVerdict& v);

/// Grid metadata plus row-major values (iy * nx + ix).
json grid_json(const IntensityGrid& g);
json grid_json(const ScalarGrid& g);

/// Test summary; include_grid adds the observed log-ratio surface.
json ratio_test_json(const RatioTestResult& r, bool include_grid = false);

/// 4 x 4 bundle keyed "a->b" with 1-based states.
json transitions_json(const TransitionCurves& t);

json model_json(const FixationModel& m);

/// Provenance sidecar for simulated runs.
json provenance_json(const std::vector<SimRun>& runs);

/// cx,cy,value rows.
void write_grid_csv(std::ostream& out, const GridGeometry& g, std::span<const double> values);
void write_curve_csv(std::ostream& out, const StepCurve& c);
void write_envelope_csv(std::ostream& out, const RankEnvelope& e);
void write_qq_csv(std::ostream& out, const QQBand& q);

/// Writes text atomically enough for our purposes: whole file, fixed newline.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace fixproc
