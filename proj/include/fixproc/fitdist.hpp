#pragma once

// Gamma distribution fitting, QQ diagnostics, truncated sampling and
// autocorrelation of duration series.

#include <span>
#include <string_view>
#include <vector>

#include "fixproc/core.hpp"
#include "fixproc/random.hpp"

namespace fixproc {

enum class GammaSource { fixation_duration, saccade_duration, saccade_length, other };

std::string_view to_string(GammaSource s);
GammaSource parse_gamma_source(std::string_view s);

/// Gamma law with shape alpha and rate beta (mean alpha / beta).
struct GammaFit {
  double shape = 1.0;
  double rate = 1.0;
  std::size_t n = 0;
  GammaSource source = GammaSource::other;

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
};

/// Raised when the shape Newton iteration does not converge.
class GammaFitError : public NumericError {
public:
  GammaFitError(const std::string& what, double last_shape)
      : NumericError(what), last_shape_(last_shape) {}
  double last_shape() const { return last_shape_; }

private:
  double last_shape_;
};

double gamma_cdf(const GammaFit& g, double x);
double gamma_sf(const GammaFit& g, double x);
double gamma_quantile(const GammaFit& g, double p);
double gamma_log_likelihood(const GammaFit& g, std::span<const double> sample);

/// Method-of-moments estimate (shape mean^2 / var, rate mean / var).
GammaFit gamma_moments(std::span<const double> sample, GammaSource source = GammaSource::other);

/// Maximum likelihood fit. Newton iteration on ln a - digamma(a) = ln(mean) -
/// mean(ln x), started at the moment estimate, until |step| < 1e-10 or 100
/// iterations. Throws DataError for non-positive values or n < 2,
/// NumericError for a degenerate (constant) sample and GammaFitError on
/// non-convergence.
GammaFit fit_gamma_mle(std::span<const double> sample, GammaSource source = GammaSource::other);

struct QQBand {
  std::vector<double> theoretical;  // Q_fit((i - 0.5) / n)
  std::vector<double> empirical;    // order statistics
  std::vector<double> lower;        // Q_fit(max(p_i - d, 0))
  std::vector<double> upper;        // Q_fit(min(p_i + d, 1)), may be +inf
  double alpha = 0.05;
  double halfwidth = 0.0;           // d = c_alpha / sqrt(n)

  /// True when every order statistic lies inside the band around the
  /// unit-slope line, i.e. the data are compatible with the fit.
  bool inside() const;
};

/// Gamma QQ data with a simultaneous band from the inverted one-sample KS
/// band; the fit is treated as fixed.
QQBand gamma_qq(std::span<const double> sample, const GammaFit& fit, double alpha = 0.05);

double sample_gamma(const GammaFit& g, Rng& rng);

/// Draw from the gamma law conditioned on (lower, upper] by inverting the
/// CDF at a uniformly rescaled probability. Throws NumericError when the
/// interval carries no representable mass.
double sample_truncated_gamma(const GammaFit& g, double lower, double upper, Rng& rng);

/// Truncation to (0, upper].
inline double sample_truncated_gamma(const GammaFit& g, double upper, Rng& rng) {
  return sample_truncated_gamma(g, 0.0, upper, rng);
}

/// Sample autocorrelation at lags 1..max_lag, normalized by the lag-0 sum.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

/// Kolmogorov distribution survival function P(K > lambda).
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p = 1.0;
};

/// One-sample KS test against a continuous CDF, p-value from the asymptotic
/// Kolmogorov law with Stephens' small-sample correction.
template <class Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf);

}  // namespace fixproc

#include <algorithm>
#include <cmath>

namespace fixproc {

template <class Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf) {
  if (sample.empty()) throw DataError("KS test on an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

}  // namespace fixproc
