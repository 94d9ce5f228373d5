#include "qms/stats.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace qms {

namespace {

// Biased autocovariances c_0 .. c_{n-1} (1/n normalization) of the
// mean-removed series, computed by circular convolution on a zero-padded
// power-of-two grid.
std::vector<double> autocovariance(const std::vector<double>& series) {
  const std::size_t n = series.size();
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  std::size_t padded = 1;
  while (padded < 2 * n) padded <<= 1;

  std::vector<std::complex<double>> buf(padded, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = series[i] - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, buf);
  for (auto& f : freq) f = std::norm(f);
  std::vector<std::complex<double>> corr;
  fft.inv(corr, freq);

  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    c[k] = corr[k].real() / static_cast<double>(n);
  }
  return c;
}

}  // namespace

AutocorrelationReport autocorrelation_time(const std::vector<double>& series,
                                           double window_factor) {
  if (series.size() < 2) {
    throw std::invalid_argument("autocorrelation needs at least two samples");
  }
  if (window_factor <= 0.0) {
    throw std::invalid_argument("window_factor must be positive");
  }

  const std::vector<double> c = autocovariance(series);
  AutocorrelationReport report;

  double scale = 0.0;
  for (double v : series) scale = std::max(scale, std::abs(v));
  if (c[0] <= scale * scale * 1e-28) {
    report.constant_series = true;
    return report;
  }

  double tau = 0.5;
  report.window_converged = false;
  for (std::size_t w = 1; w < c.size(); ++w) {
    tau += c[w] / c[0];
    report.window = static_cast<int>(w);
    if (static_cast<double>(w) >= window_factor * tau) {
      report.window_converged = true;
      break;
    }
  }
  report.tau = std::max(tau, 0.5);
  return report;
}

EstimateReport estimate(const std::vector<double>& series) {
  if (series.empty()) {
    throw std::invalid_argument("estimate needs at least one sample");
  }
  EstimateReport report;
  report.count = static_cast<std::int64_t>(series.size());

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  report.mean = mean;

  if (series.size() == 1) {
    report.constant_series = true;
    report.ess = 1.0;
    return report;
  }

  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  report.variance = ss / static_cast<double>(series.size() - 1);

  const AutocorrelationReport ac = autocorrelation_time(series);
  report.tau = ac.tau;
  report.window_converged = ac.window_converged;
  report.constant_series = ac.constant_series;

  const double n = static_cast<double>(series.size());
  if (report.constant_series) {
    report.variance = 0.0;
    report.std_error = 0.0;
    report.ess = n;
    return report;
  }
  report.std_error = std::sqrt(2.0 * report.tau * report.variance / n);
  report.ess = n / (2.0 * report.tau);
  return report;
}

EstimateReport estimate(const std::vector<double>& series, double reference) {
  EstimateReport report = estimate(series);
  report.has_reference = true;
  report.reference = reference;
  if (report.std_error > 0.0) {
    report.z = (report.mean - reference) / report.std_error;
  } else if (report.mean != reference) {
    report.z = std::numeric_limits<double>::infinity();
  }
  return report;
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma shape must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma argument must be non-negative");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_pvalue(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square dof must be positive");
  if (statistic < 0.0) {
    throw std::invalid_argument("chi-square statistic must be non-negative");
  }
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareReport chi_square_goodness(const std::vector<double>& observed,
                                    const std::vector<double>& expected,
                                    double min_expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::invalid_argument(
        "observed and expected must be non-empty and the same length");
  }

  std::vector<double> obs;
  std::vector<double> exp;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 0.0 || observed[i] < 0.0) {
      throw std::invalid_argument("counts must be non-negative");
    }
    if (expected[i] < min_expected) {
      pooled_obs += observed[i];
      pooled_exp += expected[i];
    } else {
      obs.push_back(observed[i]);
      exp.push_back(expected[i]);
    }
  }
  if (pooled_exp >= min_expected || obs.empty()) {
    obs.push_back(pooled_obs);
    exp.push_back(pooled_exp);
  } else if (pooled_exp > 0.0) {
    // Too thin to stand alone: merge into the smallest kept bin.
    std::size_t target = 0;
    for (std::size_t i = 1; i < exp.size(); ++i) {
      if (exp[i] < exp[target]) target = i;
    }
    obs[target] += pooled_obs;
    exp[target] += pooled_exp;
  }

  ChiSquareReport report;
  report.bins_used = static_cast<int>(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] <= 0.0) {
      if (obs[i] > 0.0) {
        report.statistic = std::numeric_limits<double>::infinity();
      }
      continue;
    }
    const double diff = obs[i] - exp[i];
    report.statistic += diff * diff / exp[i];
  }
  report.dof = std::max(report.bins_used - 1, 1);
  if (std::isinf(report.statistic)) {
    report.p_value = 0.0;
  } else {
    report.p_value = chi_square_pvalue(report.statistic, report.dof);
  }
  return report;
}

}  // namespace qms
