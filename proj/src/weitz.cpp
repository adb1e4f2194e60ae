#include "gibbsgraph/weitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gibbsgraph/hardcore.hpp"

namespace gibbsgraph {

NeighborhoodOrdering::NeighborhoodOrdering(const LabeledGraph& g, std::vector<std::uint32_t> ranks)
    : ranks_(std::move(ranks)) {
  if (ranks_.size() != g.flat_neighbors().size()) {
    throw std::invalid_argument("ordering size does not match the adjacency structure");
  }
  std::vector<char> seen;
  for (Vertex v = 0; v < g.size(); ++v) {
    const std::size_t deg = g.degree(v);
    seen.assign(deg + 1, 0);
    for (std::size_t i = 0; i < deg; ++i) {
      const std::uint32_t r = ranks_[g.offset(v) + i];
      if (r < 1 || r > deg || seen[r]) {
        throw std::invalid_argument("ranks of vertex " + std::to_string(v) +
                                    " are not a permutation of 1..deg");
      }
      seen[r] = 1;
    }
  }
}

std::uint32_t NeighborhoodOrdering::rank(const LabeledGraph& g, Vertex v, Vertex u) const {
  const auto nb = g.neighbors(v);
  const auto it = std::lower_bound(nb.begin(), nb.end(), u);
  if (it == nb.end() || *it != u) throw std::invalid_argument("vertices are not adjacent");
  return ranks_[g.offset(v) + static_cast<std::size_t>(it - nb.begin())];
}

NeighborhoodOrdering distance_ordering(const LabeledGraph& g) {
  if (!g.has_points()) throw std::invalid_argument("distance ordering needs embedded points");
  const Region region = g.meta().region
                            ? *g.meta().region
                            : Region(std::vector<double>(g.point(0).dim(),
                                                         std::numeric_limits<double>::max()));
  std::vector<std::uint32_t> ranks(g.flat_neighbors().size());
  std::vector<std::pair<double, Vertex>> keyed;
  std::vector<std::size_t> idx;
  for (Vertex v = 0; v < g.size(); ++v) {
    const auto nb = g.neighbors(v);
    keyed.clear();
    for (Vertex u : nb) {
      keyed.emplace_back(squared_distance_unchecked(region, g.point(v), g.point(u)), u);
    }
    idx.resize(nb.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return keyed[a] < keyed[b]; });
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      ranks[g.offset(v) + idx[pos]] = static_cast<std::uint32_t>(pos + 1);
    }
  }
  return NeighborhoodOrdering(g, std::move(ranks));
}

NeighborhoodOrdering id_ordering(const LabeledGraph& g) {
  std::vector<std::uint32_t> ranks(g.flat_neighbors().size());
  for (Vertex v = 0; v < g.size(); ++v) {
    for (std::size_t i = 0; i < g.degree(v); ++i) {
      ranks[g.offset(v) + i] = static_cast<std::uint32_t>(i + 1);
    }
  }
  return NeighborhoodOrdering(g, std::move(ranks));
}

namespace {

class PathCounter {
 public:
  PathCounter(const LabeledGraph& g, const std::uint32_t* ranks, std::size_t max_depth,
              std::uint64_t budget, WeitzLayerProfile& out)
      : g_(g), ranks_(ranks), max_depth_(max_depth), budget_(budget), out_(out),
        visited_(g.size(), 0), blocked_(g.size(), 0) {}

  void run(Vertex root) {
    out_.root = root;
    out_.counts.assign(max_depth_ + 1, 0);
    out_.counts[0] = 1;
    out_.nodes = 1;
    visited_[root] = 1;
    descend(root, 0);
  }

 private:
  // Blocks from v are added only after its successor is fixed, so they apply
  // to extensions from that successor onward.
  void descend(Vertex v, std::size_t depth) {
    if (depth == max_depth_) return;
    const auto nb = g_.neighbors(v);
    const std::size_t off = g_.offset(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const Vertex w = nb[i];
      if (visited_[w] || blocked_[w]) continue;
      if (out_.nodes >= budget_) {
        out_.truncated = true;
        stop_ = true;
        return;
      }
      ++out_.nodes;
      ++out_.counts[depth + 1];
      if (depth + 1 < max_depth_) {
        visited_[w] = 1;
        if (ranks_ != nullptr) adjust_blocks(nb, off, ranks_[off + i], +1);
        descend(w, depth + 1);
        if (ranks_ != nullptr) adjust_blocks(nb, off, ranks_[off + i], -1);
        visited_[w] = 0;
      }
      if (stop_) return;
    }
  }

  void adjust_blocks(std::span<const Vertex> nb, std::size_t off, std::uint32_t below, int delta) {
    for (std::size_t t = 0; t < nb.size(); ++t) {
      if (ranks_[off + t] < below) blocked_[nb[t]] += static_cast<std::uint32_t>(delta);
    }
  }

  const LabeledGraph& g_;
  const std::uint32_t* ranks_;
  std::size_t max_depth_;
  std::uint64_t budget_;
  WeitzLayerProfile& out_;
  std::vector<std::uint8_t> visited_;
  std::vector<std::uint32_t> blocked_;
  bool stop_ = false;
};

}  // namespace

WeitzLayerProfile weitz_layer_counts(const LabeledGraph& g, Vertex root,
                                     const NeighborhoodOrdering& ordering, std::size_t max_depth,
                                     std::uint64_t node_budget) {
  if (root >= g.size()) throw std::invalid_argument("root out of range");
  if (ordering.ranks().size() != g.flat_neighbors().size()) {
    throw std::invalid_argument("ordering belongs to a different graph");
  }
  WeitzLayerProfile out;
  PathCounter(g, ordering.ranks().data(), max_depth, node_budget, out).run(root);
  return out;
}

WeitzLayerProfile saw_layer_counts(const LabeledGraph& g, Vertex root, std::size_t max_depth,
                                   std::uint64_t node_budget) {
  if (root >= g.size()) throw std::invalid_argument("root out of range");
  WeitzLayerProfile out;
  PathCounter(g, nullptr, max_depth, node_budget, out).run(root);
  return out;
}

ConnectiveCheck connective_bound_check(const LabeledGraph& g,
                                       const NeighborhoodOrdering& ordering, std::size_t m,
                                       double target, double c, double a,
                                       std::uint64_t node_budget) {
  if (g.size() == 0) throw std::invalid_argument("graph has no vertices");
  const double need = std::ceil(a * std::log(static_cast<double>(g.size())));
  if (static_cast<double>(m) < need) {
    throw std::invalid_argument("m = " + std::to_string(m) + " is below ceil(a ln n) = " +
                                std::to_string(static_cast<long long>(need)));
  }
  if (!(target > 0.0) || !(c > 0.0)) throw std::invalid_argument("target and c must be positive");
  ConnectiveCheck out;
  out.log_bound = std::log(c) + static_cast<double>(m) * std::log(target);
  out.log_sums.resize(g.size());
  for (Vertex r = 0; r < g.size(); ++r) {
    const auto prof = weitz_layer_counts(g, r, ordering, m, node_budget);
    double sum = 0.0;
    for (auto x : prof.counts) sum += static_cast<double>(x);
    out.log_sums[r] = std::log(sum);
    if (prof.truncated) ++out.truncated_roots;
    if (prof.truncated || out.log_sums[r] > out.log_bound) out.failing_roots.push_back(r);
  }
  out.pass = out.failing_roots.empty();
  return out;
}

Estimate pwcc_k(const PotentialSpec& potential, int d, std::size_t k, std::size_t samples,
                Rng& rng) {
  Estimate est;
  est.replicates = samples;
  if (k == 0) {
    est.value = 1.0;
    est.std_error = 0.0;
    return est;
  }
  if (potential.is<ZeroPotential>()) {
    est.value = 0.0;
    est.std_error = 0.0;
    return est;
  }
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  const double c = temperedness_constant(potential, d);
  const Region free_space(std::vector<double>(static_cast<std::size_t>(d), 1.0));  // open metric
  std::vector<Point> path(k + 1, Point(static_cast<std::size_t>(d)));
  std::vector<double> step_len(k + 1, 0.0);  // step_len[i] = |x_{i+1} - x_i|
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double log_w = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const Point y = sample_interaction_displacement(potential, d, rng);
      double len2 = 0.0;
      for (int a = 0; a < d; ++a) {
        path[j][static_cast<std::size_t>(a)] = path[j - 1][static_cast<std::size_t>(a)] + y[static_cast<std::size_t>(a)];
        len2 += y[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(a)];
      }
      step_len[j - 1] = std::sqrt(len2);
      if (std::isinf(log_w)) continue;
      for (std::size_t i = 0; i + 2 <= j; ++i) {
        const double dij = std::sqrt(squared_distance_unchecked(free_space, path[i], path[j]));
        if (dij < step_len[i]) log_w -= phi_at(potential, dij);
      }
    }
    const double w = std::isinf(log_w) ? 0.0 : std::exp(log_w);
    sum += w;
    sum_sq += w * w;
  }
  const auto sd = static_cast<double>(samples);
  const double mean = sum / sd;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - sum * mean) / (sd - 1.0)) : 0.0;
  const double scale = std::pow(c, static_cast<double>(k));
  est.value = scale * mean;
  est.std_error = scale * std::sqrt(var / sd);
  return est;
}

PwccResult pwcc_estimate(const PotentialSpec& potential, int d, std::size_t k_max,
                         std::size_t samples, Rng& rng) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  PwccResult out;
  out.estimate.replicates = samples;
  if (potential.is<ZeroPotential>()) {
    out.estimate.value = 0.0;
    out.estimate.std_error = 0.0;
    out.best_k = 1;
    for (std::size_t k = 1; k <= k_max; ++k) {
      out.per_k.push_back(pwcc_k(potential, d, k, samples, rng));
      out.roots.push_back(0.0);
      out.root_se.push_back(0.0);
    }
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= k_max; ++k) {
    Estimate e = pwcc_k(potential, d, k, samples, rng);
    const double inv = 1.0 / static_cast<double>(k);
    const double root = std::pow(e.value, inv);
    // d(x^{1/k}) = (1/k) x^{1/k - 1} dx
    const double se = e.value > 0.0 ? inv * root / e.value * e.std_error : 0.0;
    out.per_k.push_back(e);
    out.roots.push_back(root);
    out.root_se.push_back(se);
    if (root < best) {
      best = root;
      out.best_k = k;
      out.estimate.value = root;
      out.estimate.std_error = se;
    }
  }
  return out;
}

std::vector<SsmRow> ssm_decay_table(const LabeledGraph& g, double lambda, Vertex root,
                                    std::span<const std::size_t> distances, Rng& rng,
                                    std::size_t budget) {
  if (g.size() > 22) throw SizeLimitError("ssm_decay_table supports n <= 22");
  if (root >= g.size()) throw std::invalid_argument("root out of range");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const auto dist = bfs_distances(g, root);
  std::vector<SsmRow> rows;
  for (std::size_t s : distances) {
    std::vector<Vertex> sphere;
    for (Vertex v = 0; v < g.size(); ++v) {
      if (dist[v] == s) sphere.push_back(v);
    }
    if (sphere.empty() || s == 0) {
      throw std::invalid_argument("no vertices at distance " + std::to_string(s) + " from root");
    }
    SsmRow row;
    row.distance = s;
    row.sphere_size = sphere.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    auto consider = [&](std::uint32_t bits) {
      Pinning pin;
      for (std::size_t i = 0; i < sphere.size(); ++i) {
        pin.emplace_back(sphere[i], static_cast<std::uint8_t>((bits >> i) & 1U));
      }
      for (std::size_t i = 0; i < sphere.size(); ++i) {
        if (!((bits >> i) & 1U)) continue;
        if (lambda == 0.0) return;
        for (std::size_t j = i + 1; j < sphere.size(); ++j) {
          if (((bits >> j) & 1U) && g.has_edge(sphere[i], sphere[j])) return;
        }
      }
      const double r = occupation_ratio_exact(g, lambda, root, pin);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++row.pinnings;
    };
    if (sphere.size() <= 16) {
      const std::uint32_t limit = std::uint32_t{1} << sphere.size();
      for (std::uint32_t bits = 0; bits < limit; ++bits) consider(bits);
    } else {
      row.sampled = true;
      consider(0);
      for (std::size_t t = 1; t < budget; ++t) {
        consider(static_cast<std::uint32_t>(rng()) & ((std::uint32_t{1} << sphere.size()) - 1));
      }
    }
    row.gap = hi - lo;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gibbsgraph
