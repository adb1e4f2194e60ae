#include "gibbsgraph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace gibbsgraph::stats {

void RunningStats::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::std_error() const noexcept {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  // 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2); converges fast for x >= 0.2.
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_test needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  TestResult r;
  r.statistic = d;
  // Stephens' finite-sample adjustment.
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

TestResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_test needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
  return r;
}

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                          double min_expected) {
  if (observed.size() != probs.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_gof: observed and probs must match and be nonempty");
  }
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<std::size_t> idx(probs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return probs[a] < probs[b] || (probs[a] == probs[b] && a < b);
  });
  std::vector<double> obs;
  std::vector<double> exp;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    acc_o += observed[idx[t]];
    acc_e += probs[idx[t]] * total;
    if (acc_e >= min_expected) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (exp.empty()) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
    } else {
      obs.back() += acc_o;
      exp.back() += acc_e;
    }
  }
  TestResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] > 0.0) {
      const double d = obs[i] - exp[i];
      r.statistic += d * d / exp[i];
    }
  }
  r.dof = obs.size() > 1 ? obs.size() - 1 : 0;
  r.p_value = r.dof > 0 ? chi_square_survival(r.statistic, static_cast<double>(r.dof)) : 1.0;
  return r;
}

double dkw_epsilon(std::size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("dkw_epsilon args");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  const std::size_t len = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    acc += std::abs(a - b);
  }
  return 0.5 * acc;
}

double binomial_cdf(std::size_t n, double p, std::size_t k) {
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  return boost::math::cdf(boost::math::binomial_distribution<double>(static_cast<double>(n), p),
                          static_cast<double>(k));
}

double poisson_cdf(double mean, std::size_t k) {
  if (mean <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::poisson_distribution<double>(mean), static_cast<double>(k));
}

double chi_square_survival(double statistic, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof),
                                                  statistic));
}

}  // namespace gibbsgraph::stats
