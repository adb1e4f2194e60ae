#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "gibbsgraph/potential.hpp"
#include "gibbsgraph/stats.hpp"

using namespace gibbsgraph;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Test-local copies of the radial profiles, written from the definitions.
double profile(const PotentialSpec& p, double d) {
  if (p.is<ZeroPotential>()) return 0.0;
  if (const auto* h = std::get_if<HardSphere>(&p.variant())) return d < 2 * h->r ? kInf : 0.0;
  if (const auto* g = std::get_if<GaussianOverlap>(&p.variant())) {
    return g->eps * std::exp(-(d / g->sigma) * (d / g->sigma));
  }
  if (const auto* g = std::get_if<GeneralizedExponential>(&p.variant())) {
    return g->eps * std::exp(-std::pow(d / g->sigma, g->p));
  }
  const auto& y = std::get<HardCoreYukawa>(p.variant());
  if (d < y.hard_radius || d == 0.0) return kInf;
  return y.eps * std::exp(-y.kappa * d) / d;
}

double weight(const PotentialSpec& p, double d) { return -std::expm1(-profile(p, d)); }

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

// S_d * int_0^upper r^(d-1) w(r) dr by the trapezoid rule.
double radial_trapezoid(const PotentialSpec& p, int d, double upper, std::size_t steps) {
  const double h = upper / static_cast<double>(steps);
  double acc = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double r = h * static_cast<double>(i);
    double f = (d == 1 ? 1.0 : std::pow(r, d - 1)) * weight(p, r);
    if (i == 0 || i == steps) f *= 0.5;
    acc += f;
  }
  return sphere_area(d) * acc * h;
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("profile examples") {
    const Region line({10.0});
    const auto hs = PotentialSpec::hard_sphere(0.5);
    CHECK(phi(hs, line, Point{0.0}, Point{0.3}) == kInf);
    CHECK(phi(hs, line, Point{0.0}, Point{1.5}) == 0.0);
    CHECK(phi(PotentialSpec::gaussian_overlap(2.0, 1.0), line, Point{1.0}, Point{1.0}) == 2.0);
    CHECK(phi(PotentialSpec::zero(), line, Point{1.0}, Point{1.0}) == 0.0);
    CHECK(phi_at(PotentialSpec::hard_core_yukawa(0.0, 1.0, 1.0), 0.0) == kInf);
    CHECK(phi_at(PotentialSpec::hard_core_yukawa(0.5, 1.0, 1.0), 0.4) == kInf);
    CHECK(phi_at(PotentialSpec::hard_core_yukawa(0.5, 1.0, 1.0), 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  }

  TEST_CASE("edge probability examples") {
    const Region line({10.0});
    CHECK(edge_probability(PotentialSpec::hard_sphere(0.5), line, Point{0.0}, Point{0.3}) == 1.0);
    CHECK(edge_probability(PotentialSpec::hard_sphere(0.5), line, Point{0.0}, Point{3.0}) == 0.0);
    CHECK(edge_probability(PotentialSpec::zero(), line, Point{0.0}, Point{0.0}) == 0.0);
    CHECK(edge_probability_at(PotentialSpec::gaussian_overlap(std::log(2.0), 1.0), 0.0) ==
          doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(PotentialSpec::hard_sphere(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::gaussian_overlap(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::generalized_exponential(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::hard_core_yukawa(-0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(PotentialSpec::hard_core_yukawa(0.0, 1.0, 1.0));
  }

  const std::vector<PotentialSpec> families = {
      PotentialSpec::hard_sphere(0.3),
      PotentialSpec::gaussian_overlap(1.0, 1.0),
      PotentialSpec::generalized_exponential(1.5, 0.7, 3.0),
      PotentialSpec::generalized_exponential(0.5, 1.0, 0.8),
      PotentialSpec::hard_core_yukawa(0.2, 1.0, 2.0),
      PotentialSpec::hard_core_yukawa(0.0, 1.0, 1.0),
  };

  TEST_CASE("symmetry and range of edge probabilities") {
    Rng rng(3);
    const Region box({3.0, 3.0}, Boundary::periodic);
    for (const auto& p : families) {
      for (int t = 0; t < 10000; ++t) {
        const Point x = sample_uniform(box, rng);
        const Point y = sample_uniform(box, rng);
        CHECK(phi(p, box, x, y) == phi(p, box, y, x));
        const double e = edge_probability(p, box, x, y);
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
      }
    }
  }

  TEST_CASE("edge probability is nonincreasing in distance") {
    for (const auto& p : families) {
      double prev = 1.0;
      for (int i = 0; i <= 4000; ++i) {
        const double e = edge_probability_at(p, 0.0025 * i);
        CHECK(e <= prev);
        prev = e;
      }
    }
  }

  TEST_CASE("hard-sphere constant is the ball of radius 2r") {
    CHECK(temperedness_constant(PotentialSpec::hard_sphere(0.5), 1) == 2.0);
    CHECK(temperedness_constant(PotentialSpec::hard_sphere(0.5), 2) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-12));
    for (int d = 1; d <= 3; ++d) {
      const double r = 0.37;
      const double closed = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) *
                            std::pow(2 * r, d);
      CHECK(temperedness_constant(PotentialSpec::hard_sphere(r), d) ==
            doctest::Approx(closed).epsilon(1e-12));
    }
    CHECK(temperedness_constant(PotentialSpec::zero(), 2) == 0.0);
  }

  TEST_CASE("Gaussian overlap in 1D against a fine trapezoid") {
    // 10^6 points on [0, 10 sigma], doubled for the two half-lines.
    const auto g = PotentialSpec::gaussian_overlap(1.0, 1.0);
    const double oracle = radial_trapezoid(g, 1, 10.0, 1000000);
    CHECK(temperedness_constant(g, 1) == doctest::Approx(oracle).epsilon(1e-6));
  }

  TEST_CASE("soft families against radial trapezoid") {
    struct Case {
      PotentialSpec p;
      int d;
      double upper;
    };
    const std::vector<Case> cases = {
        {PotentialSpec::gaussian_overlap(1.0, 1.0), 2, 10.0},
        {PotentialSpec::gaussian_overlap(3.0, 0.5), 3, 6.0},
        {PotentialSpec::generalized_exponential(1.5, 0.7, 3.0), 2, 8.0},
        {PotentialSpec::generalized_exponential(0.5, 1.0, 0.8), 1, 6000.0},
        {PotentialSpec::hard_core_yukawa(0.2, 1.0, 2.0), 3, 30.0},
        {PotentialSpec::hard_core_yukawa(0.0, 1.0, 1.0), 1, 60.0},
    };
    for (const auto& c : cases) {
      // The hard core is a jump; put it on a grid node by integrating it apart.
      double oracle = 0.0;
      if (const auto* y = std::get_if<HardCoreYukawa>(&c.p.variant()); y && y->hard_radius > 0) {
        const double rh = y->hard_radius;
        oracle = std::pow(std::numbers::pi, c.d / 2.0) / std::tgamma(c.d / 2.0 + 1.0) * std::pow(rh, c.d);
        const std::size_t steps = 2000000;
        const double h = (c.upper - rh) / steps;
        double acc = 0.0;
        for (std::size_t i = 0; i <= steps; ++i) {
          const double r = rh + h * i;
          double f = std::pow(r, c.d - 1) * weight(c.p, r);
          if (i == 0 || i == steps) f *= 0.5;
          acc += f;
        }
        oracle += sphere_area(c.d) * acc * h;
      } else {
        oracle = radial_trapezoid(c.p, c.d, c.upper, 4000000);
      }
      CHECK(temperedness_constant(c.p, c.d) == doctest::Approx(oracle).epsilon(1e-5));
    }
  }

  TEST_CASE("soft families against plain Monte Carlo in a cube") {
    struct Case {
      PotentialSpec p;
      int d;
      double half;
    };
    const std::vector<Case> cases = {
        {PotentialSpec::gaussian_overlap(1.0, 1.0), 2, 5.0},
        {PotentialSpec::generalized_exponential(1.5, 0.7, 3.0), 2, 3.0},
        {PotentialSpec::hard_core_yukawa(0.2, 1.0, 2.0), 3, 5.0},
    };
    Rng rng(17);
    for (const auto& c : cases) {
      const std::size_t samples = 10000000;
      const double cube = std::pow(2 * c.half, c.d);
      stats::RunningStats s;
      for (std::size_t i = 0; i < samples; ++i) {
        double r2 = 0.0;
        for (int a = 0; a < c.d; ++a) {
          const double x = (2 * uniform01(rng) - 1) * c.half;
          r2 += x * x;
        }
        s.add(cube * weight(c.p, std::sqrt(r2)));
      }
      const double exact = temperedness_constant(c.p, c.d);
      CHECK(std::abs(s.mean() - exact) <= std::max(1e-4 * exact, 4.0 * s.std_error()));
    }
  }

  TEST_CASE("interaction displacements follow the normalized weight") {
    Rng rng(23);
    struct Case {
      PotentialSpec p;
      int d;
      double upper;
    };
    const std::vector<Case> cases = {
        {PotentialSpec::hard_sphere(0.4), 2, 0.8},
        {PotentialSpec::gaussian_overlap(1.0, 1.0), 1, 10.0},
        {PotentialSpec::gaussian_overlap(2.0, 0.5), 3, 5.0},
        {PotentialSpec::generalized_exponential(1.5, 0.7, 3.0), 2, 8.0},
        {PotentialSpec::generalized_exponential(0.5, 1.0, 0.8), 1, 6000.0},
        {PotentialSpec::hard_core_yukawa(0.2, 1.0, 2.0), 3, 30.0},
        {PotentialSpec::hard_core_yukawa(0.0, 0.5, 1.0), 2, 60.0},
    };
    for (const auto& c : cases) {
      // Radial CDF on a grid, from the test-local profile.
      const std::size_t grid = 400000;
      const double h = c.upper / grid;
      std::vector<double> cdf(grid + 1, 0.0);
      for (std::size_t i = 1; i <= grid; ++i) {
        const double a = h * (i - 1);
        const double b = h * i;
        const double fa = std::pow(a, c.d - 1) * weight(c.p, a);
        const double fb = std::pow(b, c.d - 1) * weight(c.p, b);
        cdf[i] = cdf[i - 1] + 0.5 * (fa + fb) * h;
      }
      const double total = cdf[grid];
      auto radial_cdf = [&](double r) {
        if (r >= c.upper) return 1.0;
        const double pos = r / h;
        const auto i = static_cast<std::size_t>(pos);
        const double t = pos - i;
        return (cdf[i] * (1 - t) + cdf[std::min(i + 1, grid)] * t) / total;
      };
      std::vector<double> radii;
      for (int i = 0; i < 20000; ++i) {
        const Point y = sample_interaction_displacement(c.p, c.d, rng);
        REQUIRE(y.dim() == static_cast<std::size_t>(c.d));
        double r2 = 0.0;
        for (int a = 0; a < c.d; ++a) r2 += y[a] * y[a];
        radii.push_back(std::sqrt(r2));
      }
      CHECK(stats::ks_test(radii, radial_cdf).p_value > 0.001);
    }
    CHECK_THROWS_AS(sample_interaction_displacement(PotentialSpec::zero(), 1, rng), std::domain_error);
  }
}
