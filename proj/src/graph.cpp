#include "gibbsgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace gibbsgraph {

LabeledGraph LabeledGraph::from_edges(std::size_t n, std::span<const Edge> edges,
                                      std::vector<Point> points, GraphMeta meta) {
  if (n > std::numeric_limits<Vertex>::max()) throw std::invalid_argument("too many vertices");
  if (!points.empty() && points.size() != n) {
    throw std::invalid_argument("point list length " + std::to_string(points.size()) +
                                " does not match vertex count " + std::to_string(n));
  }
  LabeledGraph g;
  g.offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.neighbors_[fill[u]++] = v;
    g.neighbors_[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) {
      throw std::invalid_argument("duplicate edge at vertex " + std::to_string(v));
    }
  }
  g.points_ = std::move(points);
  g.meta_ = std::move(meta);

  if (n > 0 && 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n) >
                   static_cast<double>(n) / 8.0) {
    g.words_per_row_ = (n + 63) / 64;
    g.dense_.assign(n * g.words_per_row_, 0);
    for (std::size_t v = 0; v < n; ++v) {
      for (Vertex u : g.neighbors(static_cast<Vertex>(v))) {
        g.dense_[v * g.words_per_row_ + u / 64] |= std::uint64_t{1} << (u % 64);
      }
    }
  }
  return g;
}

bool LabeledGraph::has_edge(Vertex u, Vertex v) const noexcept {
  if (u >= size() || v >= size()) return false;
  if (!dense_.empty()) return (dense_[u * words_per_row_ + v / 64] >> (v % 64)) & 1U;
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> LabeledGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (Vertex u = 0; u < size(); ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<Point> sample_points(const Region& region, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_points requires n >= 1");
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_uniform(region, rng));
  return pts;
}

namespace {

// Pairs closer than `range` via a uniform cell grid with cells at least
// `range` wide. Output pairs are (i, j) with i < j.
std::vector<Edge> pairs_within(const std::vector<Point>& pts, const Region& region, double range) {
  const std::size_t d = region.dim();
  std::vector<std::size_t> cells(d);
  std::vector<double> width(d);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    const double want = std::floor(region.side(a) / range);
    cells[a] = static_cast<std::size_t>(std::clamp(want, 1.0, 1024.0));
    width[a] = region.side(a) / static_cast<double>(cells[a]);
    total *= cells[a];
  }
  auto cell_coords = [&](const Point& p) {
    std::vector<std::size_t> c(d);
    for (std::size_t a = 0; a < d; ++a) {
      const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(p[a] / width[a])));
      c[a] = std::min(k, cells[a] - 1);
    }
    return c;
  };
  auto flatten = [&](const std::vector<std::size_t>& c) {
    std::size_t idx = 0;
    for (std::size_t a = d; a-- > 0;) idx = idx * cells[a] + c[a];
    return idx;
  };

  std::vector<std::vector<Vertex>> bucket(total);
  std::vector<std::vector<std::size_t>> coords(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    coords[i] = cell_coords(pts[i]);
    bucket[flatten(coords[i])].push_back(static_cast<Vertex>(i));
  }

  const double range2 = range * range;
  std::vector<Edge> out;
  std::vector<std::size_t> nearby;
  std::vector<std::size_t> c(d);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    nearby.clear();
    std::size_t combos = 1;
    for (std::size_t a = 0; a < d; ++a) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      std::size_t rest = code;
      bool ok = true;
      for (std::size_t a = 0; a < d; ++a) {
        const long delta = static_cast<long>(rest % 3) - 1;
        rest /= 3;
        long k = static_cast<long>(coords[i][a]) + delta;
        const long m = static_cast<long>(cells[a]);
        if (k < 0 || k >= m) {
          if (!region.periodic()) {
            ok = false;
            break;
          }
          k = (k + m) % m;
        }
        c[a] = static_cast<std::size_t>(k);
      }
      if (ok) nearby.push_back(flatten(c));
    }
    std::sort(nearby.begin(), nearby.end());
    nearby.erase(std::unique(nearby.begin(), nearby.end()), nearby.end());
    for (std::size_t cell : nearby) {
      for (Vertex j : bucket[cell]) {
        if (j <= i) continue;
        if (squared_distance_unchecked(region, pts[i], pts[j]) < range2) {
          out.emplace_back(static_cast<Vertex>(i), j);
        }
      }
    }
  }
  return out;
}

}  // namespace

LabeledGraph graph_from_points(std::vector<Point> points, const PotentialSpec& potential,
                               const Region& region, Rng& rng, std::uint64_t seed) {
  for (const auto& p : points) {
    if (p.dim() != region.dim()) throw std::invalid_argument("point dimension mismatch");
    if (!region.contains(p)) throw std::invalid_argument("point lies outside the region");
  }
  GraphMeta meta{seed, potential, region, {}};
  std::vector<Edge> edges;
  if (potential.is<ZeroPotential>()) {
    // no edges
  } else if (const auto* hs = std::get_if<HardSphere>(&potential.variant())) {
    // The strict inequality d < 2r matches phi_at exactly.
    edges = pairs_within(points, region, 2.0 * hs->r);
    std::sort(edges.begin(), edges.end());
  } else {
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = edge_probability_at(
            potential, std::sqrt(squared_distance_unchecked(region, points[i], points[j])));
        if (p <= 0.0) continue;
        if (p >= 1.0 || uniform01(rng) < p) {
          edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
        }
      }
    }
  }
  const std::size_t n = points.size();
  return LabeledGraph::from_edges(n, edges, std::move(points), std::move(meta));
}

LabeledGraph sample_graph(const Region& region, const PotentialSpec& potential, std::size_t n,
                          Rng& rng, std::uint64_t seed) {
  auto pts = sample_points(region, n, rng);
  return graph_from_points(std::move(pts), potential, region, rng, seed);
}

LabeledGraph sample_graph(const Region& region, const PotentialSpec& potential, std::size_t n,
                          std::uint64_t seed) {
  Rng rng(seed);
  return sample_graph(region, potential, n, rng, seed);
}

std::size_t max_degree(const LabeledGraph& g) noexcept {
  std::size_t best = 0;
  for (Vertex v = 0; v < g.size(); ++v) best = std::max(best, g.degree(v));
  return best;
}

LabeledGraph empty_graph(std::size_t n) { return LabeledGraph::from_edges(n, {}); }

LabeledGraph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return LabeledGraph::from_edges(n, e);
}

LabeledGraph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return LabeledGraph::from_edges(n, e);
}

LabeledGraph cycle_graph(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i) e.emplace_back(i, static_cast<Vertex>((i + 1) % n));
  return LabeledGraph::from_edges(n, e);
}

LabeledGraph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (Vertex i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return LabeledGraph::from_edges(leaves + 1, e);
}

LabeledGraph induced_subgraph(const LabeledGraph& g, std::span<const Vertex> keep) {
  constexpr Vertex kAbsent = std::numeric_limits<Vertex>::max();
  std::vector<Vertex> index(g.size(), kAbsent);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= g.size()) throw std::invalid_argument("vertex out of range");
    if (index[keep[i]] != kAbsent) throw std::invalid_argument("vertex listed twice");
    index[keep[i]] = static_cast<Vertex>(i);
  }
  std::vector<Edge> e;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (Vertex u : g.neighbors(keep[i])) {
      const Vertex j = index[u];
      if (j != kAbsent && i < j) e.emplace_back(static_cast<Vertex>(i), j);
    }
  }
  std::vector<Point> pts;
  if (g.has_points()) {
    for (Vertex v : keep) pts.push_back(g.point(v));
  }
  return LabeledGraph::from_edges(keep.size(), e, std::move(pts), g.meta());
}

LabeledGraph without_edge(const LabeledGraph& g, Vertex u, Vertex v) {
  if (!g.has_edge(u, v)) throw std::invalid_argument("edge not present");
  auto e = g.edges();
  const Edge drop{std::min(u, v), std::max(u, v)};
  e.erase(std::find(e.begin(), e.end(), drop));
  return LabeledGraph::from_edges(g.size(), e, g.points(), g.meta());
}

LabeledGraph with_vertex(const LabeledGraph& g, std::span<const Vertex> attach) {
  if (g.has_points()) throw std::invalid_argument("with_vertex needs a graph without points");
  auto e = g.edges();
  const auto fresh = static_cast<Vertex>(g.size());
  for (Vertex u : attach) e.emplace_back(u, fresh);
  return LabeledGraph::from_edges(g.size() + 1, e, {}, g.meta());
}

std::vector<std::vector<Vertex>> connected_components(const LabeledGraph& g) {
  std::vector<std::vector<Vertex>> out;
  std::vector<char> seen(g.size(), 0);
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    out.emplace_back();
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      out.back().push_back(v);
      for (Vertex u : g.neighbors(v)) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

std::vector<std::size_t> bfs_distances(const LabeledGraph& g, Vertex root) {
  std::vector<std::size_t> dist(g.size(), std::numeric_limits<std::size_t>::max());
  if (root >= g.size()) throw std::invalid_argument("root out of range");
  std::queue<Vertex> q;
  dist[root] = 0;
  q.push(root);
  while (!q.empty()) {
    const Vertex v = q.front();
    q.pop();
    for (Vertex u : g.neighbors(v)) {
      if (dist[u] == std::numeric_limits<std::size_t>::max()) {
        dist[u] = dist[v] + 1;
        q.push(u);
      }
    }
  }
  return dist;
}

}  // namespace gibbsgraph
