#include "gibbsgraph/potential.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace gibbsgraph {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("potential parameter '") + what +
                                "' must be finite and positive");
  }
}

// 1 - exp(-x) for x in [0, inf], with the endpoints exact.
double one_minus_exp_neg(double x) noexcept {
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return -std::expm1(-x);
}

Point random_direction(int d, Rng& rng) {
  Point u(static_cast<std::size_t>(d));
  if (d == 1) {
    u[0] = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    return u;
  }
  std::normal_distribution<double> normal;
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      u[i] = normal(rng);
      norm2 += u[i] * u[i];
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (int i = 0; i < d; ++i) u[i] *= inv;
  return u;
}

Point scaled(Point dir, double radius) {
  for (std::size_t i = 0; i < dir.dim(); ++i) dir[i] *= radius;
  return dir;
}

double sample_radius_stretched_exponential(double eps, double sigma, double p, int d, Rng& rng) {
  // Proposal: rho^{d-1} exp(-(rho/sigma)^p), i.e. (rho/sigma)^p ~ Gamma(d/p, 1).
  // Envelope eps*exp(-(rho/sigma)^p) dominates 1 - exp(-phi).
  std::gamma_distribution<double> gamma(static_cast<double>(d) / p, 1.0);
  for (;;) {
    const double g = gamma(rng);
    const double f = eps * std::exp(-g);
    const double accept = f > 0.0 ? one_minus_exp_neg(f) / f : 1.0;
    if (uniform01(rng) < accept) return sigma * std::pow(g, 1.0 / p);
  }
}

double sample_radius_yukawa(const HardCoreYukawa& y, int d, Rng& rng) {
  // Inner ball of radius split with envelope 1; outer shell with envelope
  // (eps / split) exp(-kappa rho), which dominates 1 - exp(-phi) there.
  const double split = std::max(y.hard_radius, 1.0 / y.kappa);
  const double sphere = unit_sphere_area(d);
  const double mass_in = ball_volume(d, split);
  std::vector<double> shell_weights(static_cast<std::size_t>(d));
  double shell_total = 0.0;
  for (int j = 0; j < d; ++j) {
    const double w = boost::math::binomial_coefficient<double>(static_cast<unsigned>(d - 1),
                                                               static_cast<unsigned>(j)) *
                     std::pow(split, d - 1 - j) * std::tgamma(j + 1.0) /
                     std::pow(y.kappa, j + 1.0);
    shell_weights[static_cast<std::size_t>(j)] = w;
    shell_total += w;
  }
  const double mass_out = y.eps / split * sphere * std::exp(-y.kappa * split) * shell_total;
  const auto h = [&](double rho) {
    if (rho < y.hard_radius) return 1.0;
    return one_minus_exp_neg(y.eps * std::exp(-y.kappa * rho) / rho);
  };
  std::discrete_distribution<int> shell(shell_weights.begin(), shell_weights.end());
  for (;;) {
    if (uniform01(rng) * (mass_in + mass_out) < mass_in) {
      const double rho = split * std::pow(uniform01(rng), 1.0 / d);
      if (uniform01(rng) < h(rho)) return rho;
    } else {
      const int j = shell(rng);
      std::gamma_distribution<double> gamma(j + 1.0, 1.0 / y.kappa);
      const double rho = split + gamma(rng);
      const double envelope = y.eps / split * std::exp(-y.kappa * rho);
      if (uniform01(rng) * envelope < h(rho)) return rho;
    }
  }
}

double radial_integral(const PotentialSpec& spec, int d, double from, double scale) {
  using boost::math::quadrature::gauss_kronrod;
  const auto integrand = [&](double rho) {
    return edge_probability_at(spec, rho) * std::pow(rho, d - 1);
  };
  double err_a = 0.0;
  double err_b = 0.0;
  const double a = gauss_kronrod<double, 61>::integrate(integrand, from, from + scale, 20, 1e-12,
                                                        &err_a);
  const double b = gauss_kronrod<double, 61>::integrate(integrand, from + scale, kInf, 20, 1e-12,
                                                        &err_b);
  const double total = a + b;
  if (!std::isfinite(total)) throw std::domain_error("temperedness integral diverges");
  if (total > 0.0 && (err_a + err_b) > 1e-6 * total) {
    throw std::domain_error("temperedness quadrature did not reach relative tolerance 1e-6");
  }
  return total;
}

}  // namespace

PotentialSpec::PotentialSpec(Variant v) : v_(std::move(v)) {
  std::visit(Overloaded{
                 [](const ZeroPotential&) {},
                 [](const HardSphere& s) { require_positive(s.r, "r"); },
                 [](const GaussianOverlap& s) {
                   require_positive(s.eps, "eps");
                   require_positive(s.sigma, "sigma");
                 },
                 [](const GeneralizedExponential& s) {
                   require_positive(s.eps, "eps");
                   require_positive(s.sigma, "sigma");
                   require_positive(s.p, "p");
                 },
                 [](const HardCoreYukawa& s) {
                   if (!(s.hard_radius >= 0.0) || !std::isfinite(s.hard_radius)) {
                     throw std::invalid_argument(
                         "potential parameter 'hard_radius' must be finite and nonnegative");
                   }
                   require_positive(s.eps, "eps");
                   require_positive(s.kappa, "kappa");
                 },
             },
             v_);
}

std::string PotentialSpec::family() const {
  return std::visit(Overloaded{
                        [](const ZeroPotential&) { return std::string("zero"); },
                        [](const HardSphere&) { return std::string("hard_sphere"); },
                        [](const GaussianOverlap&) { return std::string("gaussian_overlap"); },
                        [](const GeneralizedExponential&) {
                          return std::string("generalized_exponential");
                        },
                        [](const HardCoreYukawa&) { return std::string("hard_core_yukawa"); },
                    },
                    v_);
}

double phi_at(const PotentialSpec& spec, double d) noexcept {
  return std::visit(Overloaded{
                        [](const ZeroPotential&) { return 0.0; },
                        [d](const HardSphere& s) { return d < 2.0 * s.r ? kInf : 0.0; },
                        [d](const GaussianOverlap& s) {
                          const double z = d / s.sigma;
                          return s.eps * std::exp(-z * z);
                        },
                        [d](const GeneralizedExponential& s) {
                          return s.eps * std::exp(-std::pow(d / s.sigma, s.p));
                        },
                        [d](const HardCoreYukawa& s) {
                          if (d < s.hard_radius || d == 0.0) return kInf;
                          return s.eps * std::exp(-s.kappa * d) / d;
                        },
                    },
                    spec.variant());
}

double phi(const PotentialSpec& spec, const Region& region, const Point& p, const Point& q) {
  return phi_at(spec, distance(region, p, q));
}

double edge_probability_at(const PotentialSpec& spec, double dist) noexcept {
  return one_minus_exp_neg(phi_at(spec, dist));
}

double edge_probability(const PotentialSpec& spec, const Region& region, const Point& p,
                        const Point& q) {
  return edge_probability_at(spec, distance(region, p, q));
}

double interaction_range(const PotentialSpec& spec) noexcept {
  if (spec.is<ZeroPotential>()) return 0.0;
  if (const auto* s = std::get_if<HardSphere>(&spec.variant())) return 2.0 * s->r;
  return kInf;
}

bool has_deterministic_edges(const PotentialSpec& spec) noexcept {
  return spec.is<ZeroPotential>() || spec.is<HardSphere>();
}

double ball_volume(int d, double radius) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  switch (d) {
    case 1: return 2.0 * radius;
    case 2: return std::numbers::pi * radius * radius;
    case 3: return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
    default: break;
  }
  const double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) * std::pow(radius, d);
}

double unit_sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: break;
  }
  const double half = 0.5 * d;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double temperedness_constant(const PotentialSpec& spec, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  const double sphere = unit_sphere_area(d);
  return std::visit(
      Overloaded{
          [](const ZeroPotential&) { return 0.0; },
          [d](const HardSphere& s) { return ball_volume(d, 2.0 * s.r); },
          [&](const GaussianOverlap& s) { return sphere * radial_integral(spec, d, 0.0, s.sigma); },
          [&](const GeneralizedExponential& s) {
            return sphere * radial_integral(spec, d, 0.0, s.sigma);
          },
          [&](const HardCoreYukawa& s) {
            const double scale = 1.0 / s.kappa;
            return ball_volume(d, s.hard_radius) +
                   sphere * radial_integral(spec, d, s.hard_radius, scale);
          },
      },
      spec.variant());
}

Point sample_interaction_displacement(const PotentialSpec& spec, int d, Rng& rng) {
  const double rho = std::visit(
      Overloaded{
          [](const ZeroPotential&) -> double {
            throw std::domain_error("zero potential has no interaction density");
          },
          [&](const HardSphere& s) { return 2.0 * s.r * std::pow(uniform01(rng), 1.0 / d); },
          [&](const GaussianOverlap& s) {
            return sample_radius_stretched_exponential(s.eps, s.sigma, 2.0, d, rng);
          },
          [&](const GeneralizedExponential& s) {
            return sample_radius_stretched_exponential(s.eps, s.sigma, s.p, d, rng);
          },
          [&](const HardCoreYukawa& s) { return sample_radius_yukawa(s, d, rng); },
      },
      spec.variant());
  return scaled(random_direction(d, rng), rho);
}

}  // namespace gibbsgraph
