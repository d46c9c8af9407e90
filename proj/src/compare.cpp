#include "fixproc/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fixproc/parallel.hpp"
#include "fixproc/random.hpp"

namespace fixproc {

double ks_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

bool ShiftCurve::zero_inside() const {
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (lower[i] > 0.0 || upper[i] < 0.0) return false;
  }
  return true;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double m = static_cast<double>(sorted.size());
  // Guard against p * m landing a hair above an integer.
  auto idx = static_cast<std::size_t>(std::ceil(p * m - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

ShiftCurve shift_function(std::span<const double> x_sample, std::span<const double> y_sample,
                          double alpha) {
  if (x_sample.size() < 2 || y_sample.size() < 2) {
    throw DataError("shift function needs at least two values per sample");
  }
  std::vector<double> xs(x_sample.begin(), x_sample.end());
  std::vector<double> ys(y_sample.begin(), y_sample.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();

  ShiftCurve out;
  out.alpha = alpha;
  out.band_halfwidth = ks_critical_value(alpha) *
                       std::sqrt(static_cast<double>(m + n) / (static_cast<double>(m) * n));
  out.abscissae = xs;
  out.delta.resize(n);
  out.lower.resize(n);
  out.upper.resize(n);
  const double d = out.band_halfwidth;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    // F(x) = k / n with k = #{x_j <= x}.
    const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    // G^-1(k / n) = y_(ceil(k m / n)), exact in integers.
    const std::size_t idx = std::max<std::size_t>(1, (k * m + n - 1) / n);
    const double fx = static_cast<double>(k) / static_cast<double>(n);
    out.delta[i] = ys[idx - 1] - x;
    // G^-1(u) is unbounded below for u <= 0 and above for u > 1.
    out.lower[i] = fx - d <= 0.0 ? -kInf : empirical_quantile(ys, fx - d) - x;
    out.upper[i] = fx + d > 1.0 ? kInf : empirical_quantile(ys, fx + d) - x;
  }
  return out;
}

ScalarGrid log_density_ratio(const IntensityGrid& g1, const IntensityGrid& g2) {
  if (!(g1.geometry == g2.geometry) || g1.values.size() != g2.values.size()) {
    throw DataError("log density ratio needs grids with the same window and resolution");
  }
  const double c1 = g1.integral();
  const double c2 = g2.integral();
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw NumericError("intensity surface integrates to zero");
  ScalarGrid r{g1.geometry, std::vector<double>(g1.values.size())};
  const double offset = std::log(c2) - std::log(c1);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    r.values[i] = std::log(g1.values[i]) - std::log(g2.values[i]) + offset;
  }
  return r;
}

double ratio_statistic(const ScalarGrid& r) {
  double s = 0.0;
  for (double v : r.values) s += v * v;
  return s * r.geometry.cell_area();
}

double monte_carlo_p(std::size_t k, std::size_t m) {
  if (k > m) throw ConfigError("exceedance count larger than permutation count");
  return static_cast<double>(k + 1) / static_cast<double>(m + 1);
}

namespace {

// Kernel sums per subject, cached for both bandwidths.
struct SubjectSums {
  GridGeometry geometry;
  double h1;
  double h2;
  std::vector<std::vector<double>> sums1;
  std::vector<std::vector<double>> sums2;
  std::vector<double> edge1;
  std::vector<double> edge2;

  IntensityGrid group_intensity(std::span<const std::size_t> members, bool first) const {
    const auto& sums = first ? sums1 : sums2;
    std::vector<double> total(geometry.size(), 0.0);
    for (auto s : members) {
      const auto& v = sums[s];
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += v[i];
    }
    return finish_intensity(geometry, first ? h1 : h2, total, first ? edge1 : edge2);
  }

  ScalarGrid ratio(std::span<const std::size_t> labelling, std::size_t n1) const {
    const auto g1 = group_intensity(labelling.subspan(0, n1), true);
    const auto g2 = group_intensity(labelling.subspan(n1), false);
    return log_density_ratio(g1, g2);
  }
};

}  // namespace

RatioTestResult permutation_test(std::span<const std::vector<Point>> subjects, std::size_t n1,
                                 const Window& w, const PermutationOptions& opt) {
  const std::size_t n = subjects.size();
  if (n1 < 2 || n < n1 + 2) throw DataError("permutation test needs at least 2 subjects per group");
  if (!(opt.h1 > 0.0) || !(opt.h2 > 0.0)) throw ConfigError("bandwidths must be positive");
  if (opt.permutations == 0) throw ConfigError("permutation count must be positive");
  for (const auto& s : subjects) {
    if (s.empty()) throw DataError("subject without fixations in permutation test");
    for (const auto& p : s) {
      if (!w.contains(p)) throw DataError("point outside the observation window");
    }
  }

  SubjectSums cache{GridGeometry(w, opt.nx, opt.ny), opt.h1, opt.h2, {}, {}, {}, {}};
  cache.sums1.resize(n);
  cache.sums2.resize(n);
  parallel_for(n, [&](std::size_t s) {
    cache.sums1[s] = kernel_sum_grid(subjects[s], cache.geometry, opt.h1);
    cache.sums2[s] = opt.h2 == opt.h1 ? cache.sums1[s]
                                      : kernel_sum_grid(subjects[s], cache.geometry, opt.h2);
  });
  cache.edge1 = edge_correction_grid(cache.geometry, opt.h1);
  cache.edge2 = edge_correction_grid(cache.geometry, opt.h2);

  RatioTestResult out;
  out.m = opt.permutations;
  out.h1 = opt.h1;
  out.h2 = opt.h2;
  out.n1 = n1;
  out.n2 = n - n1;

  std::vector<std::size_t> observed(n);
  std::iota(observed.begin(), observed.end(), 0);
  out.r_grid = cache.ratio(observed, n1);
  out.t0 = ratio_statistic(out.r_grid);

  out.null_stats.assign(out.m, 0.0);
  parallel_for(out.m, [&](std::size_t j) {
    auto rng = Rng::stream(opt.seed, "permutation", j);
    std::vector<std::size_t> labelling(n);
    std::iota(labelling.begin(), labelling.end(), 0);
    shuffle(std::span<std::size_t>(labelling), rng);
    out.null_stats[j] = ratio_statistic(cache.ratio(labelling, n1));
  });
  out.k = static_cast<std::size_t>(
      std::count_if(out.null_stats.begin(), out.null_stats.end(),
                    [&](double t) { return t >= out.t0; }));
  out.p = monte_carlo_p(out.k, out.m);
  return out;
}

RatioTestResult permutation_test(const Dataset& d, const PermutationOptions& opt) {
  std::vector<std::vector<Point>> subjects;
  std::size_t n1 = 0;
  for (Group g : {Group::novice, Group::non_novice}) {
    for (const auto* s : d.group(g)) {
      subjects.push_back(s->locations());
      if (g == Group::novice) ++n1;
    }
  }
  return permutation_test(subjects, n1, d.window, opt);
}

FisherResult fisher_combine(std::span<const double> p_values) {
  if (p_values.empty()) throw DataError("Fisher combination needs at least one p-value");
  FisherResult r;
  double s = 0.0;
  for (double p : p_values) {
    if (p == 0.0) throw NumericError("p-value of zero gives an infinite Fisher statistic");
    if (!(p > 0.0 && p <= 1.0)) throw DataError("p-values must lie in (0, 1]");
    s += std::log(p);
  }
  r.chi2 = -2.0 * s;
  if (r.chi2 == 0.0) r.chi2 = 0.0;  // normalize -0
  r.df = 2 * static_cast<int>(p_values.size());
  r.p = chisq_sf(r.chi2, r.df);
  return r;
}

}  // namespace fixproc
