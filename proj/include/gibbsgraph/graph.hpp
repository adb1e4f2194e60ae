#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gibbsgraph/geometry.hpp"
#include "gibbsgraph/potential.hpp"
#include "gibbsgraph/rng.hpp"

namespace gibbsgraph {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

struct GraphMeta {
  std::uint64_t seed = 0;
  std::optional<PotentialSpec> potential;
  std::optional<Region> region;
  // Left empty unless a caller asks for it; a timestamp would break
  // byte-identical reruns.
  std::string timestamp;
};

/// Undirected simple graph in CSR form, optionally with one embedded point per
/// vertex. Immutable once built.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  /// Builds from an edge list (any order, either orientation). Throws
  /// std::invalid_argument on self-loops, duplicates, out-of-range endpoints,
  /// or a point list whose length is neither 0 nor n.
  static LabeledGraph from_edges(std::size_t n, std::span<const Edge> edges,
                                 std::vector<Point> points = {}, GraphMeta meta = {});

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  /// Position of v's first neighbor in the flat adjacency array.
  std::size_t offset(Vertex v) const noexcept { return offsets_[v]; }
  std::span<const Vertex> flat_neighbors() const noexcept { return neighbors_; }

  bool has_edge(Vertex u, Vertex v) const noexcept;
  std::vector<Edge> edges() const;

  bool has_points() const noexcept { return !points_.empty(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& point(Vertex v) const { return points_.at(v); }
  const GraphMeta& meta() const noexcept { return meta_; }

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
    return a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_ && a.points_ == b.points_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> neighbors_;
  std::vector<Point> points_;
  std::vector<std::uint64_t> dense_;  // row-major bit matrix, only for dense graphs
  std::size_t words_per_row_ = 0;
  GraphMeta meta_;
};

/// n independent uniform points. Throws std::invalid_argument when n == 0.
std::vector<Point> sample_points(const Region& region, std::size_t n, Rng& rng);

/// Connects each pair {i, j} independently with probability 1 - exp(-phi).
/// Pairs whose probability is exactly 0 or 1 consume no randomness; the rest
/// consume one uniform each, in lexicographic pair order.
LabeledGraph graph_from_points(std::vector<Point> points, const PotentialSpec& potential,
                               const Region& region, Rng& rng, std::uint64_t seed = 0);

LabeledGraph sample_graph(const Region& region, const PotentialSpec& potential, std::size_t n,
                          Rng& rng, std::uint64_t seed = 0);

/// Convenience overload that owns the stream.
LabeledGraph sample_graph(const Region& region, const PotentialSpec& potential, std::size_t n,
                          std::uint64_t seed);

std::size_t max_degree(const LabeledGraph& g) noexcept;

LabeledGraph empty_graph(std::size_t n);
LabeledGraph complete_graph(std::size_t n);
LabeledGraph path_graph(std::size_t n);
LabeledGraph cycle_graph(std::size_t n);
/// Vertex 0 joined to `leaves` further vertices.
LabeledGraph star_graph(std::size_t leaves);

/// Graph with vertices `keep` (in the given order) and the induced edges.
/// Points are carried along; vertex i of the result is keep[i].
LabeledGraph induced_subgraph(const LabeledGraph& g, std::span<const Vertex> keep);

LabeledGraph without_edge(const LabeledGraph& g, Vertex u, Vertex v);

/// Appends one vertex joined to `attach`.
LabeledGraph with_vertex(const LabeledGraph& g, std::span<const Vertex> attach);

/// Connected components as lists of vertices, each sorted, ordered by their
/// smallest vertex.
std::vector<std::vector<Vertex>> connected_components(const LabeledGraph& g);

/// Breadth-first distances from root; unreachable vertices get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const LabeledGraph& g, Vertex root);

}  // namespace gibbsgraph
