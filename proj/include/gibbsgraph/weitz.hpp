#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gibbsgraph/estimate.hpp"
#include "gibbsgraph/graph.hpp"
#include "gibbsgraph/potential.hpp"
#include "gibbsgraph/rng.hpp"

namespace gibbsgraph {

/// For every vertex, a bijection from its neighbors onto 1..deg(v). Ranks are
/// stored parallel to the graph's flat adjacency array.
class NeighborhoodOrdering {
 public:
  /// Throws std::invalid_argument unless each vertex's ranks are a
  /// permutation of 1..deg(v).
  NeighborhoodOrdering(const LabeledGraph& g, std::vector<std::uint32_t> ranks);

  std::span<const std::uint32_t> ranks() const noexcept { return ranks_; }
  /// Rank of neighbor u in v's list; throws if u is not adjacent to v.
  std::uint32_t rank(const LabeledGraph& g, Vertex v, Vertex u) const;

 private:
  std::vector<std::uint32_t> ranks_;
};

/// Neighbors ranked by increasing distance, ties by increasing id. Uses the
/// region stored in the graph metadata (open Euclidean if absent).
NeighborhoodOrdering distance_ordering(const LabeledGraph& g);

/// Neighbors ranked by id.
NeighborhoodOrdering id_ordering(const LabeledGraph& g);

struct WeitzLayerProfile {
  Vertex root = 0;
  std::vector<std::uint64_t> counts;  // counts[k] = paths with k edges
  bool truncated = false;
  std::uint64_t nodes = 0;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/// Layer sizes of the Weitz tree: simple paths from root where no later path
/// vertex is a lower-ranked neighbor of an earlier one than that earlier
/// vertex's successor. Stops, with `truncated` set, after node_budget paths.
WeitzLayerProfile weitz_layer_counts(const LabeledGraph& g, Vertex root,
                                     const NeighborhoodOrdering& ordering, std::size_t max_depth,
                                     std::uint64_t node_budget = kDefaultNodeBudget);

/// Layer sizes of the self-avoiding-walk tree (all simple paths).
WeitzLayerProfile saw_layer_counts(const LabeledGraph& g, Vertex root, std::size_t max_depth,
                                   std::uint64_t node_budget = kDefaultNodeBudget);

struct ConnectiveCheck {
  std::vector<double> log_sums;  // ln sum_{k <= m} L_k, per root
  std::vector<Vertex> failing_roots;
  std::size_t truncated_roots = 0;
  double log_bound = 0.0;  // ln(c * target^m)
  bool pass = true;
};

/// Checks sum_{k<=m} L_k <= c * target^m at every root. Truncated profiles
/// count as failures. Throws std::invalid_argument if m < ceil(a ln n).
ConnectiveCheck connective_bound_check(const LabeledGraph& g,
                                       const NeighborhoodOrdering& ordering, std::size_t m,
                                       double target, double c, double a,
                                       std::uint64_t node_budget = kDefaultNodeBudget);

/// Free-space Monte Carlo estimate of the k-th potential-weighted path
/// integral with x_0 at the origin.
Estimate pwcc_k(const PotentialSpec& potential, int d, std::size_t k, std::size_t samples,
                Rng& rng);

struct PwccResult {
  Estimate estimate;  // min over k of the k-th roots
  std::size_t best_k = 0;
  std::vector<Estimate> per_k;  // index k - 1
  std::vector<double> roots;
  std::vector<double> root_se;
};

PwccResult pwcc_estimate(const PotentialSpec& potential, int d, std::size_t k_max,
                         std::size_t samples, Rng& rng);

struct SsmRow {
  std::size_t distance = 0;
  double gap = 0.0;
  std::size_t sphere_size = 0;
  std::size_t pinnings = 0;  // feasible pinnings evaluated
  bool sampled = false;      // true when pinnings were drawn rather than enumerated
};

/// For each s, pins the sphere at graph distance s from root in every feasible
/// way (or `budget` random ways when the sphere has more than 16 vertices)
/// and reports max - min of the root's occupation ratio. n <= 22. Throws
/// std::invalid_argument when a sphere is empty.
std::vector<SsmRow> ssm_decay_table(const LabeledGraph& g, double lambda, Vertex root,
                                    std::span<const std::size_t> distances, Rng& rng,
                                    std::size_t budget = 4096);

}  // namespace gibbsgraph
