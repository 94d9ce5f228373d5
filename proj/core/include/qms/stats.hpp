#pragma once

#include <cstdint>
#include <vector>

namespace qms {

struct AutocorrelationReport {
  // Integrated autocorrelation time, tau = 1/2 + sum_k rho_k over the
  // chosen window, clamped below at 1/2 (the independent-samples value).
  double tau = 0.5;
  int window = 0;
  // False when no window W with W >= window_factor * tau(W) exists below
  // the series length; tau then uses the largest window and is suspect.
  bool window_converged = true;
  bool constant_series = false;
};

// Self-consistent windowed estimate: the smallest W with
// W >= window_factor * tau(W).  Autocovariances come from one FFT pass.
AutocorrelationReport autocorrelation_time(const std::vector<double>& series,
                                           double window_factor = 6.0);

struct EstimateReport {
  std::int64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance, 1/(N-1) normalization
  double tau = 0.5;
  double std_error = 0.0;  // sqrt(2 tau variance / N)
  double ess = 0.0;        // N / (2 tau)
  double reference = 0.0;  // meaningful only when has_reference
  double z = 0.0;          // (mean - reference) / std_error
  bool has_reference = false;
  bool window_converged = true;
  bool constant_series = false;
};

EstimateReport estimate(const std::vector<double>& series);
EstimateReport estimate(const std::vector<double>& series, double reference);

// Upper regularized incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

// Upper-tail p-value of a chi-square statistic.
double chi_square_pvalue(double statistic, int dof);

struct ChiSquareReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int bins_used = 0;
};

// Goodness of fit between observed and expected counts of equal length.
// Bins with expected count below min_expected are pooled into a shared
// overflow bin before the statistic is formed; dof = bins - 1.
ChiSquareReport chi_square_goodness(const std::vector<double>& observed,
                                    const std::vector<double>& expected,
                                    double min_expected = 5.0);

}  // namespace qms
