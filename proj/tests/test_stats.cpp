#include <cmath>
#include <vector>

#include "doctest.h"
#include "qms/rng.hpp"
#include "qms/stats.hpp"

using namespace qms;

namespace {

// Box-Muller from the project RNG, for reproducible synthetic series.
std::vector<double> normal_series(int n, std::uint64_t seed) {
  RngStream rng(seed, 0, 0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(out.size()) < n) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    out.push_back(r * std::cos(2.0 * M_PI * u2));
    if (static_cast<int>(out.size()) < n)
      out.push_back(r * std::sin(2.0 * M_PI * u2));
  }
  return out;
}

}  // namespace

TEST_CASE("independent samples have tau near one half") {
  const std::vector<double> x = normal_series(100000, 42);
  const AutocorrelationReport r = autocorrelation_time(x);
  CHECK(r.window_converged);
  CHECK_FALSE(r.constant_series);
  CHECK(r.tau == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("AR(1) integrated time matches the geometric sum") {
  // x_k = phi x_{k-1} + e_k has rho_j = phi^j, so
  // tau = 1/2 + phi / (1 - phi) = 9.5 at phi = 0.9.
  const double phi = 0.9;
  const std::vector<double> noise = normal_series(200000, 7);
  std::vector<double> x(noise.size());
  x[0] = noise[0];
  for (std::size_t k = 1; k < noise.size(); ++k)
    x[k] = phi * x[k - 1] + noise[k];
  const AutocorrelationReport r = autocorrelation_time(x);
  CHECK(r.window_converged);
  CHECK(r.tau == doctest::Approx(9.5).epsilon(0.15));
}

TEST_CASE("constant series are flagged") {
  const std::vector<double> x(500, 3.25);
  const AutocorrelationReport r = autocorrelation_time(x);
  CHECK(r.constant_series);
  const EstimateReport est = estimate(x);
  CHECK(est.constant_series);
  CHECK(est.mean == 3.25);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("estimate reports moments and effective sample size") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const EstimateReport est = estimate(x);
  CHECK(est.count == 4);
  CHECK(est.mean == doctest::Approx(2.5));
  CHECK(est.variance == doctest::Approx(5.0 / 3.0));
  CHECK(est.ess == doctest::Approx(est.count / (2.0 * est.tau)));
  CHECK(est.std_error ==
        doctest::Approx(std::sqrt(2.0 * est.tau * est.variance / 4.0)));
  CHECK_FALSE(est.has_reference);
}

TEST_CASE("estimate against a reference gives a z-score") {
  const std::vector<double> x = normal_series(50000, 9);
  const EstimateReport est = estimate(x, 0.0);
  CHECK(est.has_reference);
  CHECK(est.reference == 0.0);
  CHECK(std::abs(est.z) < 4.0);
  CHECK(est.z == doctest::Approx((est.mean - 0.0) / est.std_error));

  // a shifted reference must be rejected loudly
  const EstimateReport off = estimate(x, 0.5);
  CHECK(std::abs(off.z) > 30.0);
}

TEST_CASE("autocorrelation of a correlated chain inflates the error bar") {
  const double phi = 0.9;
  const std::vector<double> noise = normal_series(100000, 13);
  std::vector<double> x(noise.size());
  x[0] = noise[0];
  for (std::size_t k = 1; k < noise.size(); ++k)
    x[k] = phi * x[k - 1] + noise[k];
  const EstimateReport est = estimate(x, 0.0);
  // stationary variance 1/(1-phi^2), tau about 9.5
  CHECK(est.variance == doctest::Approx(1.0 / (1.0 - phi * phi)).epsilon(0.1));
  CHECK(std::abs(est.z) < 4.0);
}

TEST_CASE("upper incomplete gamma spot values") {
  // Q(1, x) = exp(-x); Q(1/2, x) = erfc(sqrt(x))
  CHECK(regularized_gamma_q(1.0, 2.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  CHECK(regularized_gamma_q(0.5, 1.0) ==
        doctest::Approx(std::erfc(1.0)).epsilon(1e-10));
  CHECK(regularized_gamma_q(2.5, 0.0) == doctest::Approx(1.0));
  // large-x tail decays to zero
  CHECK(regularized_gamma_q(3.0, 50.0) < 1e-12);
}

TEST_CASE("chi-square p-values bracket the expected quantiles") {
  // For 1 dof, the 95th percentile is 3.841; for 10 dof, 18.307.
  CHECK(chi_square_pvalue(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_pvalue(18.307, 10) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_pvalue(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("goodness of fit accepts matching counts and rejects rigged ones") {
  RngStream rng(21, 0, 0);
  std::vector<double> counts(8, 0.0);
  const int n = 16000;
  for (int i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(rng.uniform() * 8.0)] += 1.0;
  }
  const std::vector<double> expected(8, n / 8.0);
  const ChiSquareReport good = chi_square_goodness(counts, expected);
  CHECK(good.dof == 7);
  CHECK(good.p_value > 1e-4);

  std::vector<double> rigged(8, n / 8.0);
  rigged[0] += 400.0;
  rigged[7] -= 400.0;
  const ChiSquareReport bad = chi_square_goodness(rigged, expected);
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("sparse bins are pooled before the statistic") {
  // expected counts below the threshold collapse into one overflow bin
  const std::vector<double> observed{50.0, 49.0, 1.0, 2.0, 1.0};
  const std::vector<double> expected{50.0, 50.0, 2.0, 2.0, 2.0};
  const ChiSquareReport pooled = chi_square_goodness(observed, expected, 5.0);
  CHECK(pooled.bins_used == 3);
  CHECK(pooled.dof == 2);
  CHECK(pooled.p_value > 0.05);

  // a pooled remainder too thin to stand alone merges into a kept bin
  const std::vector<double> thin_exp{50.0, 50.0, 1.0, 1.0, 1.0};
  const ChiSquareReport merged = chi_square_goodness(observed, thin_exp, 5.0);
  CHECK(merged.bins_used == 2);
  CHECK(merged.dof == 1);
}

TEST_CASE("length and shape guards") {
  CHECK_THROWS(autocorrelation_time(std::vector<double>{}));
  CHECK_THROWS(estimate(std::vector<double>{}));
  CHECK_THROWS(chi_square_goodness({1.0, 2.0}, {1.0}));
}
