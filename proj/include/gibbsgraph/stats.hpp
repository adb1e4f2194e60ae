#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gibbsgraph::stats {

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance (0 for fewer than two values).
  double variance() const noexcept;
  double std_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
};

/// Asymptotic Kolmogorov distribution Pr[K > x].
double kolmogorov_survival(double x);

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
TestResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

/// Pearson goodness of fit. Cells with expected count below `min_expected`
/// are pooled, smallest first, into their neighbor in expected order.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                          double min_expected = 5.0);

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz band at level alpha.
double dkw_epsilon(std::size_t n, double alpha);

double total_variation(std::span<const double> p, std::span<const double> q);

double binomial_cdf(std::size_t n, double p, std::size_t k);
double poisson_cdf(double mean, std::size_t k);
double chi_square_survival(double statistic, double dof);

}  // namespace gibbsgraph::stats
