#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gibbsgraph/experiments.hpp"
#include "gibbsgraph/hardcore.hpp"

namespace gibbsgraph {
namespace {

namespace mp = boost::multiprecision;

// m * 2^e. Every finite double is one of these, so sums and products of
// doubles and integers are exact.
struct Dyadic {
  mp::cpp_int m = 0;
  long e = 0;
};

Dyadic normalized(Dyadic d) {
  if (d.m == 0) return {0, 0};
  const auto s = mp::lsb(mp::abs(d.m));
  if (s > 0) {
    d.m >>= s;
    d.e += static_cast<long>(s);
  }
  return d;
}

Dyadic from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value in exact arithmetic");
  if (x == 0.0) return {};
  int ex = 0;
  const double f = std::frexp(x, &ex);
  return normalized({mp::cpp_int(static_cast<std::int64_t>(std::ldexp(f, 53))), ex - 53});
}

Dyadic from_int(const mp::cpp_int& v) { return normalized({v, 0}); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) { return {a.m * b.m, a.e + b.e}; }

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.m == 0) return b;
  if (b.m == 0) return a;
  const long e = std::min(a.e, b.e);
  return {(a.m << static_cast<unsigned>(a.e - e)) + (b.m << static_cast<unsigned>(b.e - e)), e};
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + Dyadic{-b.m, b.e}; }

bool operator<=(const Dyadic& a, const Dyadic& b) {
  const long e = std::min(a.e, b.e);
  return (a.m << static_cast<unsigned>(a.e - e)) <= (b.m << static_cast<unsigned>(b.e - e));
}

Dyadic abs(const Dyadic& a) { return {mp::abs(a.m), a.e}; }

Dyadic min(const Dyadic& a, const Dyadic& b) { return a <= b ? a : b; }

std::vector<Dyadic> powers(const Dyadic& x, std::size_t count) {
  std::vector<Dyadic> p(count + 1);
  p[0] = from_int(1);
  for (std::size_t i = 1; i <= count; ++i) p[i] = normalized(p[i - 1] * x);
  return p;
}

using Poly = std::vector<std::vector<std::uint64_t>>;

// sum_k sum_m c[k][m] lambda^k beta^m, given power tables.
Dyadic evaluate(const Poly& c, const std::vector<Dyadic>& lp, const std::vector<Dyadic>& bp) {
  Dyadic z;
  for (std::size_t k = 0; k < c.size(); ++k) {
    Dyadic inner;
    for (std::size_t m = 0; m < c[k].size(); ++m) {
      if (c[k][m] != 0) inner = inner + from_int(c[k][m]) * bp[m];
    }
    if (inner.m != 0) z = z + inner * lp[k];
  }
  return normalized(z);
}

std::size_t max_edges(const Poly& c) {
  std::size_t m = 0;
  for (const auto& row : c) m = std::max(m, row.size());
  return m;
}

void tally(LemmaTally& t, bool ok) {
  ++t.checks;
  if (!ok) ++t.violations;
}

std::vector<Vertex> random_subset(std::size_t n, Rng& rng) {
  std::vector<Vertex> s;
  for (std::size_t v = 0; v < n; ++v) {
    if (rng() >> 63) s.push_back(static_cast<Vertex>(v));
  }
  return s;
}

// Lower bound J! * sum_{j<=J} x^j / j! for e^x, scaled by J! so that all
// coefficients are integers.
Dyadic scaled_exp_lower(const Dyadic& x, unsigned terms, mp::cpp_int& factorial) {
  factorial = 1;
  for (unsigned j = 2; j <= terms; ++j) factorial *= j;
  Dyadic acc;
  Dyadic xp = from_int(1);
  mp::cpp_int coef = factorial;  // J! / j!
  for (unsigned j = 0; j <= terms; ++j) {
    if (j > 0) {
      xp = normalized(xp * x);
      coef /= j;
    }
    acc = acc + from_int(coef) * xp;
  }
  return normalized(acc);
}

}  // namespace

LabeledGraph lemma_corpus_graph(std::size_t index, std::size_t n_max, Rng& rng) {
  if (n_max < 2 || n_max > 19) throw std::invalid_argument("lemma corpus needs 2 <= n_max <= 19");
  const std::size_t n = 2 + uniform_index(rng, static_cast<std::uint32_t>(n_max - 1));
  if (index % 2 == 0) {
    const double p = 0.15 + 0.7 * uniform01(rng);
    std::vector<Edge> edges;
    for (Vertex i = 0; i < n; ++i) {
      for (Vertex j = i + 1; j < n; ++j) {
        if (uniform01(rng) < p) edges.emplace_back(i, j);
      }
    }
    return LabeledGraph::from_edges(n, edges);
  }
  const Region unit({1.0, 1.0}, Boundary::open);
  return sample_graph(unit, PotentialSpec::hard_sphere(0.25), n, rng);
}

LemmaReport check_lemmas(const LabeledGraph& graph, const std::vector<double>& lambdas,
                         const std::vector<double>& betas, Rng& rng) {
  // Drop the points so a vertex can be appended.
  const LabeledGraph g = LabeledGraph::from_edges(graph.size(), graph.edges());
  const std::size_t n = g.size();
  if (n + 1 > 20) throw SizeLimitError("check_lemmas needs n <= 19");

  const Poly zg = partition_polynomial(g);
  std::vector<Poly> minus_edge;
  for (const auto& [u, v] : g.edges()) minus_edge.push_back(partition_polynomial(without_edge(g, u, v)));
  const auto attach_h = random_subset(n, rng);
  const auto attach_h2 = random_subset(n, rng);
  const Poly zh = partition_polynomial(with_vertex(g, attach_h));
  const Poly zh2 = partition_polynomial(with_vertex(g, attach_h2));
  const auto removed = random_subset(n, rng);
  std::vector<Vertex> kept;
  {
    std::vector<bool> gone(n, false);
    for (Vertex v : removed) gone[v] = true;
    for (Vertex v = 0; v < n; ++v) {
      if (!gone[v]) kept.push_back(v);
    }
  }
  const Poly zs = partition_polynomial(induced_subgraph(g, kept));

  std::size_t edge_cap = max_edges(zg);
  for (const auto& p : {zh, zh2}) edge_cap = std::max(edge_cap, max_edges(p));

  LemmaReport report;
  for (double lambda_d : lambdas) {
    const Dyadic lambda = from_double(lambda_d);
    const auto lp = powers(lambda, n + 1);
    const Dyadic l2 = normalized(lambda * lambda);
    for (double beta_d : betas) {
      const Dyadic beta = from_double(beta_d);
      const auto bp = powers(beta, edge_cap);
      const Dyadic z = evaluate(zg, lp, bp);

      for (const auto& pe : minus_edge) {
        const Dyadic d = evaluate(pe, lp, bp) - z;
        tally(report.remove_edge, Dyadic{} <= d && d <= l2 * z);
      }

      const Dyadic a = evaluate(zh, lp, bp);
      const Dyadic b = evaluate(zh2, lp, bp);
      const Dyadic diff = abs(a - b);
      tally(report.add_vertex, diff <= lambda * z);
      tally(report.add_vertex, z <= min(a, b));
    }

    // Hard-core only from here on.
    const std::vector<Dyadic> bp0 = powers(Dyadic{}, edge_cap);
    const Dyadic z = evaluate(zg, lp, bp0);

    for (double lambda2_d : lambdas) {
      const Dyadic lambda2 = from_double(lambda2_d);
      const auto lp12 = powers(lambda + lambda2, n);
      const Dyadic z12 = evaluate(zg, lp12, bp0);
      mp::cpp_int fact;
      const Dyadic e_scaled =
          scaled_exp_lower(normalized(lambda2 * from_int(n)), 80, fact);
      tally(report.hardcore_bounds,
            z <= z12 && from_int(fact) * z12 <= e_scaled * z);
    }
    {
      const Dyadic zsub = evaluate(zs, lp, bp0);
      mp::cpp_int fact;
      const Dyadic e_scaled =
          scaled_exp_lower(normalized(lambda * from_int(removed.size())), 80, fact);
      tally(report.hardcore_bounds, zsub <= z && from_int(fact) * z <= e_scaled * zsub);
    }

    // Pr[|I| >= j] <= Pr[Bin(n, lambda / (1 + lambda)) >= j], cleared of
    // denominators: A_j (1 + lambda)^n <= Z sum_{k >= j} C(n, k) lambda^k.
    const Dyadic one_plus = powers(from_int(1) + lambda, n)[n];
    std::vector<mp::cpp_int> binom(n + 1);
    binom[0] = 1;
    for (std::size_t k = 1; k <= n; ++k) binom[k] = binom[k - 1] * (n - k + 1) / k;
    for (std::size_t j = 1; j <= n; ++j) {
      Dyadic tail_is;
      Dyadic tail_bin;
      for (std::size_t k = j; k <= n; ++k) {
        if (k < zg.size() && !zg[k].empty()) tail_is = tail_is + from_int(zg[k][0]) * lp[k];
        tail_bin = tail_bin + from_int(binom[k]) * lp[k];
      }
      tally(report.domination, tail_is * one_plus <= z * tail_bin);
    }
  }
  return report;
}

}  // namespace gibbsgraph
