#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gibbsgraph/estimate.hpp"
#include "gibbsgraph/geometry.hpp"
#include "gibbsgraph/graph.hpp"
#include "gibbsgraph/hardcore.hpp"
#include "gibbsgraph/potential.hpp"
#include "gibbsgraph/rng.hpp"

namespace gibbsgraph {

/// A repulsive Gibbs point process (V, lambda, phi).
class GPPInstance {
 public:
  /// Throws std::invalid_argument for negative or non-finite lambda, or a
  /// potential whose temperedness integral cannot be evaluated.
  GPPInstance(Region region, PotentialSpec potential, double lambda);

  const Region& region() const noexcept { return region_; }
  const PotentialSpec& potential() const noexcept { return potential_; }
  double lambda() const noexcept { return lambda_; }
  double volume() const noexcept { return region_.volume(); }
  double lambda_volume() const noexcept { return lambda_ * region_.volume(); }

  /// Free-space temperedness constant C_phi (an upper bound for the box).
  double temperedness() const noexcept { return c_phi_; }
  /// lambda * C_phi < e, the regime covered by the approximation theorems.
  bool in_regime() const noexcept;

 private:
  Region region_;
  PotentialSpec potential_;
  double lambda_;
  double c_phi_;
};

/// Finite multiset of points; repeated points are repeated entries.
using PointConfiguration = std::vector<Point>;

/// Sum of phi over unordered index pairs. For a point of multiplicity m this
/// includes its m(m-1)/2 self pairs, i.e. the multiplicity term. +inf when any
/// pair is infinite.
double hamiltonian(const GPPInstance& instance, const PointConfiguration& config);

struct OracleOptions {
  /// Highest order kept; default max(ceil(e^3 lambda nu), ceil(ln(2 / eps))).
  std::optional<std::size_t> truncation;
  double eps = 0.01;
  std::size_t samples_per_order = 100000;
  /// Restrict the domain to V minus this box (for void probabilities).
  std::optional<Box> excluded;
};

struct OracleResult {
  Estimate estimate;
  std::size_t truncation = 0;
  /// Deterministic bound on the omitted orders k > truncation.
  double tail_bound = 0.0;
  double domain_volume = 0.0;
  /// a_k = E[exp(-H)] over k uniform points of the domain, k = 0..truncation.
  std::vector<double> order_mean;
  std::vector<double> order_se;
  /// (lambda nu)^k a_k / k! and its standard error.
  std::vector<double> terms;
  std::vector<double> term_se;
};

/// Truncated series estimate of the grand-canonical partition function.
OracleResult oracle_partition(const GPPInstance& instance, const OracleOptions& options,
                              Rng& rng);

std::size_t default_truncation(double lambda_volume, double eps);

enum class SizeMode { theoretical, practical };

struct NChoice {
  std::size_t n = 0;
  bool practical = false;
  /// The concentration bound's n, kept even in practical mode for reporting.
  double theoretical_n = 0.0;
};

/// ceil(4 eps^-2 delta^-1 max{e^6 (lambda nu)^2, ln(4/eps)^2}).
double concentration_n(double lambda_volume, double eps, double delta);

/// Theoretical mode evaluates the concentration bound; practical mode passes
/// `practical_n` through. Throws std::invalid_argument for eps or delta
/// outside (0, 1] or practical_n < 1, and SizeLimitError when a theoretical n
/// does not fit in memory-addressable range.
NChoice choose_n(const GPPInstance& instance, double eps, double delta, SizeMode mode,
                 std::size_t practical_n = 0);

/// The approximation algorithm's N (concentration at eps/3, 1/9 plus the
/// degree-bound term). +inf outside the regime lambda * C_phi < e.
double approximation_theoretical_n(const GPPInstance& instance, double eps);

/// The sampling algorithm's n. +inf outside the regime.
double sampling_theoretical_n(const GPPInstance& instance, double eps);

/// e n / (lambda nu); graphs with max degree at or above this fail the check.
double degree_threshold(const GPPInstance& instance, std::size_t n);

struct ApproximationResult {
  Estimate estimate;
  std::size_t n = 0;
  double theoretical_n = 0.0;
  bool practical = false;
  std::size_t max_degree = 0;
};

/// Draws G ~ D(n, V, phi), applies the degree check, and estimates
/// Z_G(lambda nu / n) to eps/3 with failure probability 1/9.
ApproximationResult approximate_partition(const GPPInstance& instance, double eps, Rng& rng,
                                          SizeMode mode, std::size_t practical_n = 0,
                                          const EstimatorOptions& estimator = {});

enum class HardcoreSampler { glauber, exact };

struct SampleResult {
  PointConfiguration configuration;
  bool degree_failure = false;
  std::size_t n = 0;
  std::size_t max_degree = 0;
};

/// One run of the sampling algorithm: sample points and graph, apply the
/// degree check (empty result on failure), then draw an independent set
/// eps/4-approximately (Glauber) or exactly (n <= 26).
SampleResult sample_configuration(const GPPInstance& instance, double eps, Rng& rng,
                                  SizeMode mode, std::size_t practical_n = 0,
                                  HardcoreSampler sampler = HardcoreSampler::glauber,
                                  double glauber_constant = 20.0);

/// Pr[no points in `box`] = Xi_{V \ B} / Xi_V, with a delta-method standard
/// error from two independent oracle runs.
Estimate void_probability_oracle(const GPPInstance& instance, const Box& box,
                                 const OracleOptions& options, Rng& rng);

}  // namespace gibbsgraph
