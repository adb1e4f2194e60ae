#include "gibbsgraph/gpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gibbsgraph/parallel.hpp"

namespace gibbsgraph {
namespace {

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
}

// max{1/(e - lC), lC/(e - lC)^2}, +inf outside the regime.
double regime_factor(const GPPInstance& inst) {
  const double lc = inst.lambda() * inst.temperedness();
  if (!(lc < kE)) return kInf;
  const double gap = kE - lc;
  return std::max(1.0 / gap, lc / (gap * gap));
}

Point sample_outside(const Region& region, const std::optional<Box>& excluded, Rng& rng) {
  for (;;) {
    Point p = sample_uniform(region, rng);
    if (!excluded || !excluded->contains(p)) return p;
  }
}

}  // namespace

GPPInstance::GPPInstance(Region region, PotentialSpec potential, double lambda)
    : region_(std::move(region)), potential_(std::move(potential)), lambda_(lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("fugacity must be finite and nonnegative");
  }
  c_phi_ = temperedness_constant(potential_, static_cast<int>(region_.dim()));
}

bool GPPInstance::in_regime() const noexcept { return lambda_ * c_phi_ < kE; }

double hamiltonian(const GPPInstance& instance, const PointConfiguration& config) {
  double h = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (std::size_t j = i + 1; j < config.size(); ++j) {
      h += phi(instance.potential(), instance.region(), config[i], config[j]);
      if (std::isinf(h)) return h;
    }
  }
  return h;
}

std::size_t default_truncation(double lambda_volume, double eps) {
  check_eps(eps);
  const double a = std::ceil(std::exp(3.0) * lambda_volume);
  const double b = std::ceil(std::log(2.0 / eps));
  return static_cast<std::size_t>(std::max(a, b));
}

OracleResult oracle_partition(const GPPInstance& instance, const OracleOptions& options,
                              Rng& rng) {
  const Region& region = instance.region();
  if (options.excluded && !box_within(region, *options.excluded)) {
    throw std::invalid_argument("excluded box must lie inside the region");
  }
  if (options.samples_per_order == 0) throw std::invalid_argument("samples_per_order must be >= 1");
  OracleResult out;
  out.domain_volume = region.volume() - (options.excluded ? options.excluded->volume() : 0.0);
  out.domain_volume = std::max(0.0, out.domain_volume);
  const double lv = instance.lambda() * out.domain_volume;
  out.truncation = options.truncation ? *options.truncation : default_truncation(lv, options.eps);
  const std::size_t m = out.truncation;
  out.order_mean.assign(m + 1, 0.0);
  out.order_se.assign(m + 1, 0.0);
  out.terms.assign(m + 1, 0.0);
  out.term_se.assign(m + 1, 0.0);
  out.order_mean[0] = 1.0;
  if (m >= 1) out.order_mean[1] = 1.0;

  const std::uint64_t base = rng();
  const std::size_t samples = options.samples_per_order;
  if (lv > 0.0 && m >= 2) {
    parallel_for(m - 1, [&](std::size_t idx) {
      const std::size_t k = idx + 2;
      Rng stream(derive_seed(base, k));
      std::vector<Point> pts;
      pts.reserve(k);
      double sum = 0.0;
      double sum_sq = 0.0;
      for (std::size_t s = 0; s < samples; ++s) {
        pts.clear();
        double h = 0.0;
        for (std::size_t i = 0; i < k && !std::isinf(h); ++i) {
          pts.push_back(sample_outside(region, options.excluded, stream));
          for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
            h += phi_at(instance.potential(),
                        std::sqrt(squared_distance_unchecked(region, pts[j], pts.back())));
          }
        }
        const double w = std::isinf(h) ? 0.0 : std::exp(-h);
        sum += w;
        sum_sq += w * w;
      }
      const double mean = sum / static_cast<double>(samples);
      const double var =
          samples > 1 ? std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(samples - 1))
                      : 0.0;
      out.order_mean[k] = mean;
      out.order_se[k] = std::sqrt(var / static_cast<double>(samples));
    });
  }

  double total = 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    double scale = 1.0;
    if (k > 0) {
      scale = lv > 0.0 ? std::exp(static_cast<double>(k) * std::log(lv) -
                                  std::lgamma(static_cast<double>(k) + 1.0))
                       : 0.0;
    }
    out.terms[k] = scale * out.order_mean[k];
    out.term_se[k] = scale * out.order_se[k];
    total += out.terms[k];
    var += out.term_se[k] * out.term_se[k];
  }
  const auto m1 = static_cast<double>(m + 1);
  out.tail_bound =
      lv > 0.0 ? std::exp(lv + m1 * std::log(lv) - std::lgamma(m1 + 1.0)) : 0.0;
  out.estimate.value = total;
  out.estimate.std_error = std::sqrt(var);
  out.estimate.rel_error_target = total > 0.0 ? out.tail_bound / total : 0.0;
  out.estimate.confidence = 1.0;
  out.estimate.replicates = samples;
  return out;
}

double concentration_n(double lambda_volume, double eps, double delta) {
  check_eps(eps);
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double a = std::exp(6.0) * lambda_volume * lambda_volume;
  const double l = std::log(4.0 / eps);
  return std::ceil(4.0 / (eps * eps * delta) * std::max(a, l * l));
}

NChoice choose_n(const GPPInstance& instance, double eps, double delta, SizeMode mode,
                 std::size_t practical_n) {
  NChoice c;
  c.theoretical_n = concentration_n(instance.lambda_volume(), eps, delta);
  if (mode == SizeMode::practical) {
    if (practical_n < 1) throw std::invalid_argument("practical n must be >= 1");
    c.n = practical_n;
    c.practical = true;
    return c;
  }
  if (c.theoretical_n > 1e12) {
    throw SizeLimitError("theoretical n = " + std::to_string(c.theoretical_n) + " is not tractable");
  }
  c.n = static_cast<std::size_t>(c.theoretical_n);
  return c;
}

double approximation_theoretical_n(const GPPInstance& instance, double eps) {
  check_eps(eps);
  const double lv = instance.lambda_volume();
  const double l = std::log(4.0 / eps);
  const double first = 324.0 / (eps * eps) * std::max(std::exp(6.0) * lv * lv, l * l);
  const double z = 24.0 * regime_factor(instance) * lv;
  if (std::isinf(z)) return kInf;
  const double second = z > 1.0 ? z * std::pow(std::log(z), 2) : 0.0;
  return std::ceil(std::max(first, second));
}

double sampling_theoretical_n(const GPPInstance& instance, double eps) {
  check_eps(eps);
  const double lv = instance.lambda_volume();
  const double first = 8.0 * 18.0 * 18.0 * 12.0 / (eps * eps * eps) *
                       std::max(std::exp(6.0) * lv * lv, std::log(4.0 * 18.0 / eps));
  const double f = regime_factor(instance);
  if (std::isinf(f)) return kInf;
  const double l = std::log(4.0 * kE / eps);
  const double inner = 3.0 * l * f * lv;
  const double second = inner > 1.0 ? 2.0 * inner * std::pow(std::log(inner), 2) : 0.0;
  return std::ceil(std::max(first, second));
}

double degree_threshold(const GPPInstance& instance, std::size_t n) {
  return kE * static_cast<double>(n) / instance.lambda_volume();
}

ApproximationResult approximate_partition(const GPPInstance& instance, double eps, Rng& rng,
                                          SizeMode mode, std::size_t practical_n,
                                          const EstimatorOptions& estimator) {
  check_eps(eps);
  ApproximationResult res;
  res.theoretical_n = approximation_theoretical_n(instance, eps);
  res.estimate.rel_error_target = eps;
  res.estimate.confidence = 2.0 / 3.0;
  if (mode == SizeMode::practical) {
    if (practical_n < 1) throw std::invalid_argument("practical n must be >= 1");
    res.n = practical_n;
    res.practical = true;
  } else {
    if (!(res.theoretical_n <= 1e12)) {
      throw SizeLimitError("theoretical n is not tractable for this instance");
    }
    res.n = static_cast<std::size_t>(res.theoretical_n);
  }
  if (instance.lambda() == 0.0) {
    res.estimate.value = 1.0;
    res.estimate.std_error = 0.0;
    return res;
  }
  const LabeledGraph g = sample_graph(instance.region(), instance.potential(), res.n, rng);
  res.max_degree = max_degree(g);
  if (static_cast<double>(res.max_degree) >= degree_threshold(instance, res.n)) {
    res.estimate.value = std::numeric_limits<double>::quiet_NaN();
    res.estimate.valid = false;
    res.estimate.reason = "degree";
    return res;
  }
  const double lambda_n = instance.lambda_volume() / static_cast<double>(res.n);
  Estimate inner = estimate_partition(g, lambda_n, eps / 3.0, 1.0 / 9.0, rng, estimator);
  res.estimate.value = inner.value;
  res.estimate.std_error = inner.std_error;
  res.estimate.replicates = inner.replicates;
  res.estimate.valid = inner.valid;
  res.estimate.reason = inner.reason;
  return res;
}

SampleResult sample_configuration(const GPPInstance& instance, double eps, Rng& rng,
                                  SizeMode mode, std::size_t practical_n,
                                  HardcoreSampler sampler, double glauber_constant) {
  check_eps(eps);
  SampleResult res;
  if (mode == SizeMode::practical) {
    if (practical_n < 1) throw std::invalid_argument("practical n must be >= 1");
    res.n = practical_n;
  } else {
    const double pn = sampling_theoretical_n(instance, eps);
    if (!(pn <= 1e12)) throw SizeLimitError("theoretical n is not tractable for this instance");
    res.n = static_cast<std::size_t>(pn);
  }
  if (instance.lambda() == 0.0) return res;
  const LabeledGraph g = sample_graph(instance.region(), instance.potential(), res.n, rng);
  res.max_degree = max_degree(g);
  if (static_cast<double>(res.max_degree) >= degree_threshold(instance, res.n)) {
    res.degree_failure = true;
    return res;
  }
  const double lambda_n = instance.lambda_volume() / static_cast<double>(res.n);
  SpinConfiguration sigma;
  if (sampler == HardcoreSampler::exact) {
    sigma = exact_sample(g, lambda_n, rng);
  } else {
    sigma = glauber_sample(g, lambda_n, default_glauber_steps(res.n, eps / 4.0, glauber_constant),
                           rng);
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    if (sigma[v]) res.configuration.push_back(g.point(v));
  }
  return res;
}

Estimate void_probability_oracle(const GPPInstance& instance, const Box& box,
                                 const OracleOptions& options, Rng& rng) {
  if (!box_within(instance.region(), box)) {
    throw std::invalid_argument("sub-box must lie inside the region");
  }
  Estimate est;
  est.confidence = 1.0;
  if (box.volume() == 0.0 || instance.lambda() == 0.0) {
    est.value = 1.0;
    est.std_error = 0.0;
    return est;
  }
  OracleOptions full = options;
  full.excluded.reset();
  OracleOptions part = options;
  part.excluded = box;
  // Both series are truncated at the full-domain order so their tails match.
  if (!full.truncation) full.truncation = default_truncation(instance.lambda_volume(), options.eps);
  part.truncation = full.truncation;
  const OracleResult den = oracle_partition(instance, full, rng);
  const OracleResult num = oracle_partition(instance, part, rng);
  const double r = num.estimate.value / den.estimate.value;
  const double a = num.estimate.std_error / num.estimate.value;
  const double b = den.estimate.std_error / den.estimate.value;
  est.value = r;
  est.std_error = r * std::sqrt(a * a + b * b);
  est.replicates = options.samples_per_order;
  return est;
}

}  // namespace gibbsgraph
