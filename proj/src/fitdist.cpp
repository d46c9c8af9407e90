#include "fixproc/fitdist.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "fixproc/compare.hpp"

namespace fixproc {

std::string_view to_string(GammaSource s) {
  switch (s) {
    case GammaSource::fixation_duration:
      return "fixation_duration";
    case GammaSource::saccade_duration:
      return "saccade_duration";
    case GammaSource::saccade_length:
      return "saccade_length";
    case GammaSource::other:
      return "other";
  }
  return "other";
}

GammaSource parse_gamma_source(std::string_view s) {
  if (s == "fixation_duration") return GammaSource::fixation_duration;
  if (s == "saccade_duration") return GammaSource::saccade_duration;
  if (s == "saccade_length") return GammaSource::saccade_length;
  if (s == "other") return GammaSource::other;
  throw DataError("unknown gamma source '" + std::string(s) + "'");
}

double gamma_cdf(const GammaFit& g, double x) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(g.shape, g.rate * x);
}

double gamma_sf(const GammaFit& g, double x) {
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(g.shape, g.rate * x);
}

double gamma_quantile(const GammaFit& g, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  if (p > 0.5) return boost::math::gamma_q_inv(g.shape, 1.0 - p) / g.rate;
  return boost::math::gamma_p_inv(g.shape, p) / g.rate;
}

double gamma_log_likelihood(const GammaFit& g, std::span<const double> sample) {
  const double n = static_cast<double>(sample.size());
  double sum = 0.0;
  double sum_log = 0.0;
  for (double x : sample) {
    sum += x;
    sum_log += std::log(x);
  }
  return n * (g.shape * std::log(g.rate) - std::lgamma(g.shape)) + (g.shape - 1.0) * sum_log -
         g.rate * sum;
}

namespace {

void check_sample(std::span<const double> sample) {
  if (sample.size() < 2) throw DataError("gamma fit needs at least two values");
  for (double x : sample) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw DataError("gamma fit needs strictly positive finite values");
    }
  }
}

}  // namespace

GammaFit gamma_moments(std::span<const double> sample, GammaSource source) {
  check_sample(sample);
  const double n = static_cast<double>(sample.size());
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  double var = 0.0;
  for (double x : sample) var += (x - mean) * (x - mean);
  var /= n;
  if (!(var > 0.0)) throw NumericError("degenerate sample: zero variance");
  return {mean * mean / var, mean / var, sample.size(), source};
}

GammaFit fit_gamma_mle(std::span<const double> sample, GammaSource source) {
  check_sample(sample);
  const double n = static_cast<double>(sample.size());
  double mean = 0.0;
  double mean_log = 0.0;
  for (double x : sample) {
    mean += x;
    mean_log += std::log(x);
  }
  mean /= n;
  mean_log /= n;
  const double spread = std::log(mean) - mean_log;  // >= 0 by Jensen
  if (!(spread > 1e-14)) {
    throw NumericError("degenerate sample: zero log-spread, shape diverges");
  }

  double shape = gamma_moments(sample, source).shape;
  for (int iter = 0; iter < 100; ++iter) {
    const double g = std::log(shape) - boost::math::digamma(shape) - spread;
    const double dg = 1.0 / shape - boost::math::trigamma(shape);
    double next = shape - g / dg;
    if (!(next > 0.0)) next = 0.5 * shape;
    const double step = next - shape;
    shape = next;
    if (std::abs(step) < 1e-10) {
      return {shape, shape / mean, sample.size(), source};
    }
  }
  throw GammaFitError("gamma shape iteration did not converge", shape);
}

bool QQBand::inside() const {
  for (std::size_t i = 0; i < empirical.size(); ++i) {
    if (empirical[i] < lower[i] || empirical[i] > upper[i]) return false;
  }
  return true;
}

QQBand gamma_qq(std::span<const double> sample, const GammaFit& fit, double alpha) {
  if (sample.empty()) throw DataError("QQ plot of an empty sample");
  if (!(fit.shape > 0.0) || !(fit.rate > 0.0)) throw ConfigError("invalid gamma fit");
  QQBand out;
  out.alpha = alpha;
  out.empirical.assign(sample.begin(), sample.end());
  std::sort(out.empirical.begin(), out.empirical.end());
  const std::size_t n = out.empirical.size();
  out.halfwidth = ks_critical_value(alpha) / std::sqrt(static_cast<double>(n));
  out.theoretical.resize(n);
  out.lower.resize(n);
  out.upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.theoretical[i] = gamma_quantile(fit, p);
    out.lower[i] = gamma_quantile(fit, std::max(p - out.halfwidth, 0.0));
    out.upper[i] = gamma_quantile(fit, std::min(p + out.halfwidth, 1.0));
  }
  return out;
}

double sample_gamma(const GammaFit& g, Rng& rng) {
  return sample_truncated_gamma(g, 0.0, std::numeric_limits<double>::infinity(), rng);
}

double sample_truncated_gamma(const GammaFit& g, double lower, double upper, Rng& rng) {
  if (!(upper > 0.0)) throw ConfigError("truncation point must be positive");
  if (!(lower >= 0.0) || !(lower < upper)) throw ConfigError("empty truncation interval");
  const double f_lo = gamma_cdf(g, lower);
  const double f_hi = gamma_cdf(g, upper);
  const double s_lo = gamma_sf(g, lower);
  const double s_hi = gamma_sf(g, upper);
  if (!(f_hi - f_lo > 0.0) && !(s_lo - s_hi > 0.0)) {
    throw NumericError("truncation region carries no probability mass");
  }
  const double u = rng.uniform();
  double x;
  // Invert through whichever tail keeps the target probability accurate.
  const double p = f_lo + u * (f_hi - f_lo);
  if (p < 0.5 && p > 0.0) {
    x = boost::math::gamma_p_inv(g.shape, p) / g.rate;
  } else {
    const double q = s_hi + (1.0 - u) * (s_lo - s_hi);
    x = boost::math::gamma_q_inv(g.shape, q) / g.rate;
  }
  return std::clamp(x, lower, upper);
}

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n <= max_lag) throw DataError("series shorter than the requested lag");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  if (!(c0 > 0.0)) throw NumericError("autocorrelation of a constant series");
  std::vector<double> out(max_lag);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += (series[t] - mean) * (series[t + k] - mean);
    out[k - 1] = ck / c0;
  }
  return out;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace fixproc
