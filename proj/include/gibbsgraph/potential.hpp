#pragma once

#include <string>
#include <variant>

#include "gibbsgraph/geometry.hpp"
#include "gibbsgraph/rng.hpp"

namespace gibbsgraph {

// Registered repulsive pair-potential families. Every family depends on the
// distance only and takes values in [0, +inf].
struct ZeroPotential {
  friend bool operator==(const ZeroPotential&, const ZeroPotential&) = default;
};

/// +inf below distance 2r, 0 otherwise.
struct HardSphere {
  double r;
  friend bool operator==(const HardSphere&, const HardSphere&) = default;
};

/// eps * exp(-(d / sigma)^2).
struct GaussianOverlap {
  double eps;
  double sigma;
  friend bool operator==(const GaussianOverlap&, const GaussianOverlap&) = default;
};

/// eps * exp(-(d / sigma)^p).
struct GeneralizedExponential {
  double eps;
  double sigma;
  double p;
  friend bool operator==(const GeneralizedExponential&, const GeneralizedExponential&) = default;
};

/// +inf below hard_radius, eps * exp(-kappa d) / d beyond it.
struct HardCoreYukawa {
  double hard_radius;
  double eps;
  double kappa;
  friend bool operator==(const HardCoreYukawa&, const HardCoreYukawa&) = default;
};

class PotentialSpec {
 public:
  using Variant =
      std::variant<ZeroPotential, HardSphere, GaussianOverlap, GeneralizedExponential, HardCoreYukawa>;

  PotentialSpec() = default;
  /// Validates parameters; throws std::invalid_argument.
  PotentialSpec(Variant v);  // NOLINT(google-explicit-constructor)

  static PotentialSpec zero() { return PotentialSpec(ZeroPotential{}); }
  static PotentialSpec hard_sphere(double r) { return PotentialSpec(HardSphere{r}); }
  static PotentialSpec gaussian_overlap(double eps, double sigma) {
    return PotentialSpec(GaussianOverlap{eps, sigma});
  }
  static PotentialSpec generalized_exponential(double eps, double sigma, double p) {
    return PotentialSpec(GeneralizedExponential{eps, sigma, p});
  }
  static PotentialSpec hard_core_yukawa(double hard_radius, double eps, double kappa) {
    return PotentialSpec(HardCoreYukawa{hard_radius, eps, kappa});
  }

  const Variant& variant() const noexcept { return v_; }
  std::string family() const;

  template <class T>
  bool is() const noexcept { return std::holds_alternative<T>(v_); }

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;

 private:
  Variant v_{ZeroPotential{}};
};

/// Radial profile phi(d) of the potential.
double phi_at(const PotentialSpec& spec, double dist) noexcept;

double phi(const PotentialSpec& spec, const Region& region, const Point& p, const Point& q);

/// 1 - exp(-phi(d)); exactly 1 for phi = +inf and exactly 0 for phi = 0.
double edge_probability_at(const PotentialSpec& spec, double dist) noexcept;

double edge_probability(const PotentialSpec& spec, const Region& region, const Point& p,
                        const Point& q);

/// Distance beyond which phi is identically zero (+inf for unbounded range).
double interaction_range(const PotentialSpec& spec) noexcept;

/// True when every edge probability is 0 or 1, so graphs need no edge coins.
bool has_deterministic_edges(const PotentialSpec& spec) noexcept;

/// Volume of the d-ball of the given radius.
double ball_volume(int d, double radius);

/// Surface area of the unit sphere in R^d (2 for d = 1).
double unit_sphere_area(int d);

/// Integral over R^d of 1 - exp(-phi(|y|)). Closed form for hard spheres,
/// adaptive radial quadrature (relative tolerance 1e-6 or better) otherwise.
/// This is the free-space constant; it upper-bounds the supremum over any box.
double temperedness_constant(const PotentialSpec& spec, int d);

/// Displacement y in R^d with density (1 - exp(-phi(|y|))) / C_phi, drawn by
/// exact rejection sampling. Requires a nonzero potential.
Point sample_interaction_displacement(const PotentialSpec& spec, int d, Rng& rng);

}  // namespace gibbsgraph
