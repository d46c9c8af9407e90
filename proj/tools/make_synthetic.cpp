// make_synthetic: writes a two-group synthetic fixation dataset in the ingest
// schema. Both groups share a hotspot layout; the non_novice layout shifts one
// hotspot to the right.

#include <iostream>

#include "CLI11.hpp"
#include "fixproc/ingest.hpp"
#include "fixproc/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic two-group fixation dataset"};
  std::string out = "synthetic_two_group.csv";
  std::uint64_t seed = 20240501;
  std::size_t subjects = 10;
  double shift = 120.0;
  double trial_length_ms = 180000.0;
  app.add_option("-o,--out", out, "Output CSV");
  app.add_option("--seed", seed, "Seed");
  app.add_option("--subjects", subjects, "Subjects per group");
  app.add_option("--shift", shift, "Hotspot shift for the non_novice group (px)");
  app.add_option("--trial-length-ms", trial_length_ms, "Trial length (ms)");
  CLI11_PARSE(app, argc, argv);

  try {
    fixproc::SyntheticParams params;
    params.trial_length_ms = trial_length_ms;
    fixproc::Dataset d;
    d.window = params.window;
    d.trial_length_ms = trial_length_ms;
    for (auto g : {fixproc::Group::novice, fixproc::Group::non_novice}) {
      const auto hotspots = fixproc::reference_hotspots(g, shift);
      const auto model = fixproc::synthetic_model(hotspots, g, params);
      const std::string prefix = g == fixproc::Group::novice ? "nov" : "exp";
      for (auto& s : fixproc::simulate_subjects(model, subjects, seed, prefix)) {
        s.group = g;
        s.painting_id = "synthetic";
        d.sequences.push_back(std::move(s));
      }
    }
    fixproc::write_fixations(out, d);
    std::cerr << "wrote " << d.fixation_count() << " fixations for " << d.sequences.size()
              << " subjects to " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
