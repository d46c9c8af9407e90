#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "fixproc/fitdist.hpp"
#include "fixproc/random.hpp"

using namespace fixproc;

namespace {

std::vector<double> draws(const GammaFit& g, std::size_t n, std::uint64_t seed) {
  auto rng = Rng::stream(seed, "gamma");
  std::vector<double> out(n);
  for (auto& v : out) v = sample_gamma(g, rng);
  return out;
}

double normal(Rng& rng) {
  return std::sqrt(-2.0 * std::log(rng.uniform())) * std::cos(2.0 * M_PI * rng.uniform());
}

}  // namespace

TEST_CASE("gamma MLE recovers shape 2 rate 0.01") {
  const GammaFit truth{2.0, 0.01};
  const auto x = draws(truth, 100000, 1);
  const auto f = fit_gamma_mle(x, GammaSource::fixation_duration);
  CHECK(f.shape >= 1.94);
  CHECK(f.shape <= 2.06);
  CHECK(f.rate == doctest::Approx(0.01).epsilon(0.03));
  CHECK(f.n == 100000);
  CHECK(f.source == GammaSource::fixation_duration);
  CHECK(gamma_log_likelihood(f, x) >= gamma_log_likelihood(gamma_moments(x), x));
}

TEST_CASE("gamma MLE on exponential data") {
  const auto x = draws(GammaFit{1.0, 0.5}, 100000, 2);
  const auto f = fit_gamma_mle(x);
  CHECK(f.shape >= 0.95);
  CHECK(f.shape <= 1.05);
}

TEST_CASE("MLE improves on the moment estimate for small samples") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = draws(GammaFit{0.7 + 0.3 * double(s), 0.02}, 40, 100 + s);
    const auto f = fit_gamma_mle(x);
    CHECK(gamma_log_likelihood(f, x) >= gamma_log_likelihood(gamma_moments(x), x) - 1e-9);
    CHECK(f.mean() == doctest::Approx(std::accumulate(x.begin(), x.end(), 0.0) / 40.0));
  }
}

TEST_CASE("gamma fit errors") {
  CHECK_THROWS_AS(fit_gamma_mle(std::vector<double>(10, 3.0)), NumericError);
  CHECK_THROWS_AS(fit_gamma_mle(std::vector<double>{1.0, -2.0, 3.0}), DataError);
  CHECK_THROWS_AS(fit_gamma_mle(std::vector<double>{1.0}), DataError);
}

TEST_CASE("QQ of exact quantiles lies on the unit line") {
  const GammaFit g{3.0, 0.02};
  std::vector<double> q;
  for (int i = 1; i <= 50; ++i) q.push_back(gamma_quantile(g, (i - 0.5) / 50.0));
  const auto band = gamma_qq(q, g);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(band.empirical[i] == doctest::Approx(band.theoretical[i]));
    CHECK(band.lower[i] <= band.theoretical[i]);
    CHECK(band.theoretical[i] <= band.upper[i]);
  }
  CHECK(band.halfwidth == doctest::Approx(1.3581 / std::sqrt(50.0)).epsilon(1e-4));
  CHECK(band.inside());
}

TEST_CASE("QQ band holds for gamma data against its own fit") {
  int inside = 0;
  for (std::uint64_t r = 0; r < 500; ++r) {
    const auto x = draws(GammaFit{2.5, 0.01}, 500, 1000 + r);
    if (gamma_qq(x, fit_gamma_mle(x)).inside()) ++inside;
  }
  CHECK(inside >= 465);
}

TEST_CASE("QQ band rejects heavy-tailed log-normal data") {
  auto rng = Rng::stream(4, "lognormal");
  std::vector<double> x(2000);
  for (auto& v : x) v = std::exp(5.0 + 1.5 * normal(rng));
  CHECK_FALSE(gamma_qq(x, fit_gamma_mle(x)).inside());
}

TEST_CASE("truncated sampler without effective truncation matches the gamma CDF") {
  const GammaFit g{2.0, 1.0};
  auto rng = Rng::stream(6, "trunc");
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_truncated_gamma(g, std::numeric_limits<double>::infinity(), rng);
  CHECK(ks_test(x, [&](double v) { return gamma_cdf(g, v); }).statistic < 0.01);
}

TEST_CASE("truncated sampler respects the bound and the conditional mean") {
  const GammaFit g{2.0, 1.0};
  auto rng = Rng::stream(7, "trunc");
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double v = sample_truncated_gamma(g, 2.0, rng);
    REQUIRE(v <= 2.0);
    REQUIRE(v > 0.0);
    sum += v;
  }
  // Composite Simpson for int_0^2 x f(x) dx and int_0^2 f(x) dx with
  // f(x) = x e^{-x}.
  const int panels = 2000;
  const double step = 2.0 / panels;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double x = i * step;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    num += w * x * x * std::exp(-x);
    den += w * x * std::exp(-x);
  }
  CHECK(sum / n == doctest::Approx(num / den).epsilon(0.005));
}

TEST_CASE("truncated sampler with lower bound and empty mass") {
  const GammaFit g{2.0, 1.0};
  auto rng = Rng::stream(8, "trunc");
  for (int i = 0; i < 1000; ++i) {
    const double v = sample_truncated_gamma(g, 1.0, 1.5, rng);
    CHECK(v > 1.0);
    CHECK(v <= 1.5);
  }
  CHECK_THROWS_AS(sample_truncated_gamma(GammaFit{50.0, 1.0}, 1e-300, rng), NumericError);
  // Far tail: the survival branch keeps draws above the lower bound.
  for (int i = 0; i < 100; ++i) CHECK(sample_truncated_gamma(g, 40.0, 1e9, rng) > 40.0);
}

TEST_CASE("acf examples") {
  auto rng = Rng::stream(9, "acf");
  std::vector<double> noise(5000);
  for (auto& v : noise) v = normal(rng);
  const auto a = acf(noise, 20);
  REQUIRE(a.size() == 20);
  int small = 0;
  for (double v : a) small += std::abs(v) < 2.0 / std::sqrt(5000.0);
  CHECK(small >= 17);

  std::vector<double> alt(200);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  CHECK(acf(alt, 1)[0] == doctest::Approx(-1.0).epsilon(0.01));

  std::vector<double> ar(10000);
  double prev = 0.0;
  for (auto& v : ar) prev = v = 0.8 * prev + normal(rng);
  const double a1 = acf(ar, 1)[0];
  CHECK(a1 >= 0.75);
  CHECK(a1 <= 0.85);

  CHECK_THROWS_AS(acf(std::vector<double>(10, 2.0), 2), NumericError);
  CHECK_THROWS(acf(std::vector<double>{1, 2, 3}, 3));
}

TEST_CASE("gamma cdf, sf and quantile agree") {
  const GammaFit g{2.0, 1.0};
  CHECK(gamma_cdf(g, 2.0) == doctest::Approx(1.0 - 3.0 * std::exp(-2.0)));
  CHECK(gamma_sf(g, 2.0) == doctest::Approx(3.0 * std::exp(-2.0)));
  CHECK(gamma_quantile(g, gamma_cdf(g, 1.3)) == doctest::Approx(1.3));
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(kolmogorov_sf(0.0) == 1.0);
}
