#include "fixproc/synthetic.hpp"

#include <cmath>
#include <cstdio>

namespace fixproc {

IntensityGrid hotspot_surface(const Window& w, std::span<const Hotspot> hotspots, int nx, int ny,
                              double background) {
  if (!(background >= 0.0)) throw ConfigError("background must be >= 0");
  IntensityGrid g{GridGeometry(w, nx, ny), 0.0, {}};
  g.values.resize(g.geometry.size());
  double min_sigma = 0.0;
  for (const auto& h : hotspots) {
    if (!(h.sigma > 0.0) || !(h.weight >= 0.0)) throw ConfigError("invalid hotspot");
    min_sigma = min_sigma == 0.0 ? h.sigma : std::min(min_sigma, h.sigma);
  }
  g.bandwidth = min_sigma > 0.0 ? min_sigma : 1.0;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Point c{g.geometry.center_x(ix), g.geometry.center_y(iy)};
      double v = background;
      for (const auto& h : hotspots) {
        const double d2 = (c.x - h.center.x) * (c.x - h.center.x) + (c.y - h.center.y) * (c.y - h.center.y);
        v += h.weight * std::exp(-d2 / (2.0 * h.sigma * h.sigma));
      }
      g.values[g.geometry.index(ix, iy)] = std::max(v, kIntensityFloor);
    }
  }
  return g;
}

FixationModel synthetic_model(std::span<const Hotspot> hotspots, Group group,
                              const SyntheticParams& p) {
  FixationModel m;
  m.intensity_all = hotspot_surface(p.window, hotspots, p.nx, p.ny);
  m.intensity_first = m.intensity_all;
  m.dur_fix = p.dur_fix;
  m.dur_sac = p.dur_sac;
  m.len_sac = p.len_sac;
  m.p_long = p.p_long;
  m.window = p.window;
  m.trial_length_ms = p.trial_length_ms;
  m.n_angles = p.n_angles;
  m.group = group;
  m.painting_id = "synthetic";
  validate_model(m);
  return m;
}

std::vector<Hotspot> reference_hotspots(Group group, double shift) {
  std::vector<Hotspot> h = {{{230.0, 260.0}, 70.0, 1.0}, {{540.0, 330.0}, 60.0, 0.8},
                            {{380.0, 560.0}, 80.0, 0.9}};
  if (group == Group::non_novice) h[2].center.x += shift;
  return h;
}

std::vector<FixationSequence> simulate_subjects(const FixationModel& m, std::size_t count,
                                                std::uint64_t seed, const std::string& prefix) {
  std::vector<FixationSequence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char id[64];
    std::snprintf(id, sizeof id, "%s_%02zu", prefix.c_str(), i + 1);
    auto rng = Rng::stream(seed, "subject/" + prefix, i);
    out.push_back(simulate_run(m, rng, id).sequence);
  }
  return out;
}

}  // namespace fixproc
