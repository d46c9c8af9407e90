#pragma once

// Two-group comparison: shift functions with simultaneous KS bands, the log
// density ratio of two intensity surfaces, its integrated-square statistic,
// the subject-level Monte Carlo permutation test and Fisher's combination.

#include <cstdint>
#include <span>
#include <vector>

#include "fixproc/core.hpp"
#include "fixproc/density.hpp"

namespace fixproc {

/// Asymptotic two-sided Kolmogorov-Smirnov critical value sqrt(-ln(alpha/2)/2);
/// 1.3581 at alpha = 0.05.
double ks_critical_value(double alpha);

struct ShiftCurve {
  std::vector<double> abscissae;  // sorted x sample
  std::vector<double> delta;
  std::vector<double> lower;
  std::vector<double> upper;
  double alpha = 0.05;
  double band_halfwidth = 0.0;  // d = c_alpha * sqrt((m + n) / (m n))

  /// True when the zero function lies inside the band at every abscissa.
  bool zero_inside() const;
};

/// Left-continuous inverse of the right-continuous ECDF of a sorted sample:
/// the smallest y with G(y) >= p; p <= 0 gives the minimum, p >= 1 the maximum.
double empirical_quantile(std::span<const double> sorted, double p);

/// Delta(x) = G^-1(F(x)) - x evaluated at every x sample value, with the
/// band G^-1(F(x) -+ d) - x; band edges are infinite where F(x) - d <= 0 or
/// F(x) + d > 1.
ShiftCurve shift_function(std::span<const double> x_sample, std::span<const double> y_sample,
                          double alpha = 0.05);

/// log f1 - log f2 per cell, each surface normalized by its Riemann integral.
ScalarGrid log_density_ratio(const IntensityGrid& g1, const IntensityGrid& g2);

/// Riemann sum of r^2 over the window.
double ratio_statistic(const ScalarGrid& r);

struct RatioTestResult {
  double t0 = 0.0;
  double p = 1.0;
  std::size_t m = 0;
  std::size_t k = 0;  // permutations with T_j >= T0
  double h1 = 0.0;
  double h2 = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  ScalarGrid r_grid;             // observed log ratio
  std::vector<double> null_stats;  // T_1..T_m in permutation order
};

/// Monte Carlo p-value (k + 1) / (m + 1).
double monte_carlo_p(std::size_t k, std::size_t m);

struct PermutationOptions {
  std::size_t permutations = 10000;
  double h1 = 20.0;
  double h2 = 16.0;
  std::uint64_t seed = 1;
  int nx = 128;
  int ny = 128;
};

/// Permutation test on subject point sets: the first `n1` entries of
/// `subjects` form group 1 under the observed labelling. Labels are permuted
/// across subjects, never across fixations; h1 and h2 stay fixed. Permutation
/// j draws from its own stream keyed by (seed, j).
RatioTestResult permutation_test(std::span<const std::vector<Point>> subjects, std::size_t n1,
                                 const Window& w, const PermutationOptions& opt);

/// Dataset form: novices are group 1, non-novices group 2.
RatioTestResult permutation_test(const Dataset& d, const PermutationOptions& opt);

struct FisherResult {
  double chi2 = 0.0;
  int df = 0;
  double p = 1.0;
};

FisherResult fisher_combine(std::span<const double> p_values);

}  // namespace fixproc
