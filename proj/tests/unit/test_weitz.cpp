#include <doctest.h>

#include <cmath>
#include <vector>

#include "gibbsgraph/hardcore.hpp"
#include "gibbsgraph/weitz.hpp"

using namespace gibbsgraph;

namespace {

// Independent enumerator: all simple paths from root, filtered by the rule
// rank_{v_j}(v_{k+1}) > rank_{v_j}(v_{j+1}) for every earlier v_j adjacent
// to the new vertex.
void enumerate(const LabeledGraph& g, const NeighborhoodOrdering* ord, std::vector<Vertex>& path,
               std::vector<std::uint64_t>& counts, std::size_t depth) {
  counts[path.size() - 1] += 1;
  if (path.size() - 1 == depth) return;
  for (Vertex w : g.neighbors(path.back())) {
    if (std::find(path.begin(), path.end(), w) != path.end()) continue;
    bool ok = true;
    if (ord) {
      for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        if (g.has_edge(path[j], w) && ord->rank(g, path[j], w) < ord->rank(g, path[j], path[j + 1])) {
          ok = false;
        }
      }
    }
    if (!ok) continue;
    path.push_back(w);
    enumerate(g, ord, path, counts, depth);
    path.pop_back();
  }
}

std::vector<std::uint64_t> oracle_counts(const LabeledGraph& g, Vertex root,
                                         const NeighborhoodOrdering* ord, std::size_t depth) {
  std::vector<std::uint64_t> counts(depth + 1, 0);
  std::vector<Vertex> path{root};
  enumerate(g, ord, path, counts, depth);
  return counts;
}

LabeledGraph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> e;
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i + 1; j < n; ++j) {
      if (uniform01(rng) < p) e.emplace_back(i, j);
    }
  }
  return LabeledGraph::from_edges(n, e);
}

LabeledGraph random_tree(std::size_t n, Rng& rng) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(uniform_index(rng, v), v);
  return LabeledGraph::from_edges(n, e);
}

std::vector<std::uint64_t> head(const WeitzLayerProfile& p, std::size_t len) {
  return {p.counts.begin(), p.counts.begin() + std::min(len, p.counts.size())};
}

}  // namespace

TEST_SUITE("weitz") {
  TEST_CASE("orderings") {
    const auto p = path_graph(2);
    const auto o = id_ordering(p);
    CHECK(o.rank(p, 0, 1) == 1);
    CHECK_THROWS_AS(NeighborhoodOrdering(p, {2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(o.rank(path_graph(3), 0, 2), std::invalid_argument);

    // Periodic ring of 4 points: the two neighbors of each vertex tie.
    const Region ring({4.0}, Boundary::periodic);
    std::vector<Point> pts{Point{0.5}, Point{1.5}, Point{2.5}, Point{3.5}};
    Rng rng(1);
    const auto g = graph_from_points(pts, PotentialSpec::hard_sphere(0.6), ring, rng);
    const auto d = distance_ordering(g);
    CHECK(d.rank(g, 0, 1) == 1);
    CHECK(d.rank(g, 0, 3) == 2);
    CHECK(d.rank(g, 2, 1) == 1);

    const std::vector<Point> line{Point{0.0}, Point{0.5}, Point{0.2}};
    const auto h = graph_from_points(line, PotentialSpec::hard_sphere(1.0), Region({1.0}), rng);
    const auto dh = distance_ordering(h);
    CHECK(dh.rank(h, 0, 2) == 1);
    CHECK(dh.rank(h, 0, 1) == 2);
  }

  TEST_CASE("orderings are bijections") {
    Rng rng(2);
    const Region r({3.0, 3.0});
    for (int t = 0; t < 100; ++t) {
      const auto g = sample_graph(r, PotentialSpec::hard_sphere(0.3), 40, rng);
      const auto o = distance_ordering(g);
      for (Vertex v = 0; v < g.size(); ++v) {
        std::vector<std::uint32_t> seen;
        for (Vertex u : g.neighbors(v)) seen.push_back(o.rank(g, v, u));
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i + 1);
      }
    }
  }

  TEST_CASE("small profiles") {
    const auto k3 = complete_graph(3);
    const auto o = id_ordering(k3);
    CHECK(head(weitz_layer_counts(k3, 0, o, 2), 3) == std::vector<std::uint64_t>{1, 2, 1});
    CHECK(head(saw_layer_counts(k3, 0, 2), 3) == std::vector<std::uint64_t>{1, 2, 2});
    const auto p3 = path_graph(3);
    CHECK(head(weitz_layer_counts(p3, 0, id_ordering(p3), 2), 3) == std::vector<std::uint64_t>{1, 1, 1});
    CHECK(head(saw_layer_counts(p3, 0, 2), 3) == std::vector<std::uint64_t>{1, 1, 1});
    const auto c = cycle_graph(7);
    const auto sc = saw_layer_counts(c, 3, 6);
    CHECK(sc.counts[0] == 1);
    for (std::size_t k = 1; k <= 6; ++k) CHECK(sc.counts[k] == 2);
  }

  TEST_CASE("profiles match brute-force enumeration") {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
      const auto g = random_graph(4 + t % 6, 0.5, rng);
      const auto o = id_ordering(g);
      for (Vertex r = 0; r < g.size(); ++r) {
        const auto w = weitz_layer_counts(g, r, o, 6);
        const auto s = saw_layer_counts(g, r, 6);
        CHECK(head(w, 7) == oracle_counts(g, r, &o, 6));
        CHECK(head(s, 7) == oracle_counts(g, r, nullptr, 6));
        CHECK(w.counts[0] == 1);
        CHECK(w.counts[1] == g.degree(r));
        for (std::size_t k = 0; k < w.counts.size(); ++k) CHECK(w.counts[k] <= s.counts[k]);
      }
    }
  }

  TEST_CASE("trees have no pruning") {
    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
      const auto g = random_tree(15, rng);
      for (Vertex r = 0; r < g.size(); ++r) {
        CHECK(weitz_layer_counts(g, r, id_ordering(g), 8).counts == saw_layer_counts(g, r, 8).counts);
      }
    }
  }

  TEST_CASE("degree cap on geometric graphs") {
    Rng rng(5);
    const auto g = sample_graph(Region({2.0, 2.0}), PotentialSpec::hard_sphere(0.2), 60, rng);
    const auto o = distance_ordering(g);
    const double d = std::max<double>(1, max_degree(g));
    for (Vertex r = 0; r < g.size(); ++r) {
      const auto w = weitz_layer_counts(g, r, o, 8);
      double sum = 0;
      double cap = 0;
      for (std::size_t k = 0; k < w.counts.size(); ++k) {
        sum += w.counts[k];
        cap += std::pow(d, double(k));
      }
      CHECK(sum <= cap);
    }
  }

  TEST_CASE("node budget truncates") {
    const auto k = complete_graph(12);
    const auto s = saw_layer_counts(k, 0, 11, 1000);
    CHECK(s.truncated);
    CHECK(s.nodes <= 1000);
  }

  TEST_CASE("connective bound check") {
    const auto e = empty_graph(10);
    const auto m = static_cast<std::size_t>(std::ceil(2 * std::log(10.0)));
    const auto r = connective_bound_check(e, id_ordering(e), m, 1.0, 1.0, 2.0);
    CHECK(r.pass);
    for (double s : r.log_sums) CHECK(s == doctest::Approx(0.0));
    CHECK_THROWS_AS(connective_bound_check(e, id_ordering(e), 1, 1.0, 1.0, 2.0), std::invalid_argument);

    // Cycle: the Weitz tree keeps both directions, L_k = 2 for 1 <= k < n.
    const auto c = cycle_graph(30);
    const auto mc = static_cast<std::size_t>(std::ceil(2 * std::log(30.0)));
    const auto cr = connective_bound_check(c, id_ordering(c), mc, 2.0, 1.0, 2.0);
    CHECK(cr.pass);
    for (double s : cr.log_sums) CHECK(s == doctest::Approx(std::log(1.0 + 2.0 * mc)));
    CHECK_FALSE(connective_bound_check(c, id_ordering(c), mc, 1.0, 1.0, 2.0).pass);
  }

  TEST_CASE("potential-weighted path integrals") {
    Rng rng(6);
    const auto hs = PotentialSpec::hard_sphere(0.5);
    CHECK(pwcc_k(hs, 1, 0, 10, rng).value == 1.0);
    CHECK(pwcc_k(hs, 1, 1, 1000, rng).value == doctest::Approx(temperedness_constant(hs, 1)));
    const auto g = PotentialSpec::gaussian_overlap(1.0, 0.5);
    const auto g1 = pwcc_k(g, 2, 1, 100000, rng);
    CHECK(std::abs(g1.value - temperedness_constant(g, 2)) <= 4 * g1.std_error + 1e-9);
    CHECK(pwcc_k(PotentialSpec::zero(), 1, 2, 100, rng).value == 0.0);

    // k = 2, 1D hard rods of diameter 1: x1 in (-1, 1), x2 within 1 of x1 and
    // dropped when closer to 0 than x1 is. Grid quadrature of that region.
    const int cells = 2000;
    const double h = 2.0 / cells;
    double grid = 0;
    for (int i = 0; i < cells; ++i) {
      const double x1 = -1 + (i + 0.5) * h;
      for (int j = 0; j < cells; ++j) {
        const double x2 = x1 - 1 + (j + 0.5) * h;
        grid += std::abs(x2) >= std::abs(x1) || std::abs(x2) >= 1.0 ? h * h : 0.0;
      }
    }
    const auto k2 = pwcc_k(hs, 1, 2, 1000000, rng);
    CHECK(grid == doctest::Approx(2.5).epsilon(0.01));
    CHECK(std::abs(k2.value - grid) <= 4 * k2.std_error + 0.01);
  }

  TEST_CASE("pwcc estimate") {
    Rng rng(7);
    CHECK(pwcc_estimate(PotentialSpec::zero(), 2, 3, 1000, rng).estimate.value == 0.0);
    const auto hs = PotentialSpec::hard_sphere(0.5);
    const auto r = pwcc_estimate(hs, 1, 3, 200000, rng);
    CHECK(r.estimate.value <= temperedness_constant(hs, 1) + 4 * r.estimate.std_error);
    REQUIRE(r.roots.size() >= 2);
    CHECK(r.roots[1] + 4 * r.root_se[1] < r.roots[0]);
  }

  TEST_CASE("ssm tables") {
    Rng rng(8);
    const std::vector<std::size_t> s{1, 2, 3};
    const auto p = path_graph(8);
    for (const auto& row : ssm_decay_table(p, 0.0, 0, s, rng)) CHECK(row.gap == 0.0);
    std::vector<Edge> e{{1, 2}, {2, 3}, {3, 4}};
    const auto iso = LabeledGraph::from_edges(5, e);
    const std::vector<std::size_t> far{1};
    CHECK_THROWS_AS(ssm_decay_table(iso, 1.0, 0, far, rng), std::invalid_argument);
    const auto rows = ssm_decay_table(path_graph(14), 0.5, 0, std::vector<std::size_t>{1, 2, 3, 4, 5}, rng);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].gap < rows[i - 1].gap);
    // Root's ratio with its neighbor pinned 0 vs 1 at s = 1 on P2: lambda - 0.
    CHECK(ssm_decay_table(path_graph(2), 0.5, 0, far, rng)[0].gap == doctest::Approx(0.5));
  }
}
