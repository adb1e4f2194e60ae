#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gibbsgraph/estimate.hpp"
#include "gibbsgraph/graph.hpp"
#include "gibbsgraph/rng.hpp"

namespace gibbsgraph {

/// sigma: [n] -> {0, 1}, one byte per vertex.
using SpinConfiguration = std::vector<std::uint8_t>;

struct SpinSystemParams {
  double lambda = 1.0;
  double beta = 0.0;  // 0 is the hard-core model, 1 is non-interacting

  /// Throws std::invalid_argument unless lambda >= 0 and beta in [0, 1].
  void validate() const;
};

std::size_t occupied_count(const SpinConfiguration& s) noexcept;
bool is_independent(const LabeledGraph& g, const SpinConfiguration& s);

/// Hard-core counting on graphs with at most 32 vertices, using one adjacency
/// bitmask per vertex. Z(mask) sums over independent subsets of `mask`.
class BitGraph {
 public:
  static constexpr std::size_t kMaxVertices = 32;

  explicit BitGraph(const LabeledGraph& g);

  std::size_t size() const noexcept { return adj_.size(); }
  std::uint32_t all() const noexcept;
  std::uint32_t neighbors(std::size_t v) const noexcept { return adj_[v]; }
  std::uint32_t closed_neighbors(std::size_t v) const noexcept {
    return adj_[v] | (std::uint32_t{1} << v);
  }

  /// Independence polynomial of the subgraph induced by `mask`, at lambda.
  double independence(std::uint32_t mask, double lambda) const;

 private:
  std::vector<std::uint32_t> adj_;
};

/// Z_G(lambda, beta). beta = 0 needs n <= 30, beta > 0 needs n <= 20;
/// larger graphs throw SizeLimitError.
double partition_exact(const LabeledGraph& g, const SpinSystemParams& params);

/// Vertex order for partition_frontier: by first coordinate when the graph
/// has points (small frontiers for one-dimensional geometric graphs), by id
/// otherwise.
std::vector<Vertex> coordinate_order(const LabeledGraph& g);

/// Exact ln Z_G(lambda, beta) for any n by a transfer computation along
/// `order`, keeping one weight per spin pattern on the frontier (processed
/// vertices with unprocessed neighbors). Throws SizeLimitError when the
/// frontier exceeds 64 vertices or the pattern count exceeds `state_budget`.
double log_partition_frontier(const LabeledGraph& g, const SpinSystemParams& params,
                              std::span<const Vertex> order, std::size_t state_budget = 1 << 20);

/// Counts c[k][m] of configurations with k ones and m fully occupied edges,
/// so Z(lambda, beta) = sum_k sum_m c[k][m] lambda^k beta^m. n <= 20.
std::vector<std::vector<std::uint64_t>> partition_polynomial(const LabeledGraph& g);

double evaluate_polynomial(const std::vector<std::vector<std::uint64_t>>& c,
                           const SpinSystemParams& params);

/// (D-1)^(D-1) / (D-2)^D, evaluated in log space. Throws for D < 3.
double critical_fugacity(std::size_t max_degree);

/// ceil(c * n * max(1, ln(n / eps_tv))).
std::uint64_t default_glauber_steps(std::size_t n, double eps_tv, double constant = 20.0);

/// Heat-bath Glauber dynamics for the hard-core model. Each step draws one
/// 64-bit word: the high half picks the vertex, the low half is the coin.
class GlauberChain {
 public:
  /// `initial` must be feasible (an independent set); empty means all zero.
  GlauberChain(const LabeledGraph& g, double lambda, SpinConfiguration initial = {});

  void set_lambda(double lambda);
  double lambda() const noexcept { return lambda_; }

  void run(std::uint64_t steps, Rng& rng);

  const SpinConfiguration& state() const noexcept { return state_; }
  std::size_t occupied() const noexcept { return occupied_; }

 private:
  const LabeledGraph* g_;
  double lambda_ = 0.0;
  std::uint64_t threshold_ = 0;  // coin is 1 iff low32 < threshold_
  SpinConfiguration state_;
  std::vector<std::uint32_t> blocked_;  // occupied-neighbor counts
  std::size_t occupied_ = 0;
};

SpinConfiguration glauber_sample(const LabeledGraph& g, double lambda, std::uint64_t steps,
                                 Rng& rng, SpinConfiguration initial = {});

/// Exact draw from the hard-core distribution by sequential conditioning.
/// n <= 26.
SpinConfiguration exact_sample(const LabeledGraph& g, double lambda, Rng& rng);

struct EstimatorOptions {
  std::size_t groups = 12;
  double glauber_constant = 20.0;
  /// Steps between consecutive samples; 0 means one per vertex.
  std::uint64_t thinning = 0;
  /// Initial burn-in; 0 means default_glauber_steps(n, eps).
  std::uint64_t burn_in = 0;
};

/// Annealed product estimator for Z_G(lambda) (hard-core, beta = 0) with
/// median-of-groups boosting. Isolated vertices are factored out exactly.
/// Above the tree threshold the estimate is flagged invalid but still computed.
Estimate estimate_partition(const LabeledGraph& g, double lambda, double eps, double fail_prob,
                            Rng& rng, const EstimatorOptions& options = {});

/// Per-group failure probability q such that a median over `groups` fails
/// with probability at most fail_prob.
double group_failure_probability(std::size_t groups, double fail_prob);

/// The annealing schedule lambda_1 < ... < lambda_M = lambda for n vertices.
std::vector<double> annealing_schedule(std::size_t n, double lambda);

using Pinning = std::vector<std::pair<Vertex, std::uint8_t>>;

/// Pr[sigma(v) = 1 | pinning] / Pr[sigma(v) = 0 | pinning] for the hard-core
/// model. n <= 26. Throws std::invalid_argument when v is pinned or the
/// pinning has probability zero.
double occupation_ratio_exact(const LabeledGraph& g, double lambda, Vertex v,
                              const Pinning& pinning);

}  // namespace gibbsgraph
