#include "gibbsgraph/hardcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace gibbsgraph {

void SpinSystemParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
}

std::size_t occupied_count(const SpinConfiguration& s) noexcept {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
}

bool is_independent(const LabeledGraph& g, const SpinConfiguration& s) {
  if (s.size() != g.size()) throw std::invalid_argument("configuration length mismatch");
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!s[v]) continue;
    for (Vertex u : g.neighbors(v)) {
      if (s[u]) return false;
    }
  }
  return true;
}

BitGraph::BitGraph(const LabeledGraph& g) : adj_(g.size(), 0) {
  if (g.size() > kMaxVertices) {
    throw SizeLimitError("bitmask counting supports at most 32 vertices, got " +
                         std::to_string(g.size()));
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    for (Vertex u : g.neighbors(v)) adj_[v] |= std::uint32_t{1} << u;
  }
}

std::uint32_t BitGraph::all() const noexcept {
  return size() == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << size()) - 1;
}

double BitGraph::independence(std::uint32_t mask, double lambda) const {
  if (mask == 0 || lambda == 0.0) return 1.0;
  int best = -1;
  int best_deg = -1;
  int degree_sum = 0;
  for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
    const int v = std::countr_zero(rest);
    const int deg = std::popcount(adj_[static_cast<std::size_t>(v)] & mask);
    degree_sum += deg;
    if (deg > best_deg) {
      best_deg = deg;
      best = v;
    }
  }
  if (best_deg <= 1) {
    // Disjoint edges and isolated vertices.
    const int edges = degree_sum / 2;
    const int isolated = std::popcount(mask) - 2 * edges;
    return std::pow(1.0 + 2.0 * lambda, edges) * std::pow(1.0 + lambda, isolated);
  }
  const std::uint32_t bit = std::uint32_t{1} << best;
  return independence(mask & ~bit, lambda) +
         lambda * independence(mask & ~(bit | adj_[static_cast<std::size_t>(best)]), lambda);
}

double partition_exact(const LabeledGraph& g, const SpinSystemParams& params) {
  params.validate();
  const std::size_t n = g.size();
  if (params.beta == 0.0) {
    if (n > 30) {
      throw SizeLimitError("partition_exact with beta = 0 supports n <= 30, got " +
                           std::to_string(n));
    }
    const BitGraph bg(g);
    return bg.independence(bg.all(), params.lambda);
  }
  if (n > 20) {
    throw SizeLimitError("partition_exact with beta > 0 supports n <= 20, got " +
                         std::to_string(n));
  }
  const BitGraph bg(g);
  std::vector<double> lam_pow(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) lam_pow[k] = lam_pow[k - 1] * params.lambda;
  std::vector<double> beta_pow(g.num_edges() + 1, 1.0);
  for (std::size_t m = 1; m < beta_pow.size(); ++m) beta_pow[m] = beta_pow[m - 1] * params.beta;
  double z = 0.0;
  const std::uint32_t limit = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    int twice_m = 0;
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
      twice_m += std::popcount(bg.neighbors(static_cast<std::size_t>(std::countr_zero(rest))) &
                               mask);
    }
    z += lam_pow[static_cast<std::size_t>(std::popcount(mask))] *
         beta_pow[static_cast<std::size_t>(twice_m / 2)];
  }
  return z;
}

std::vector<Vertex> coordinate_order(const LabeledGraph& g) {
  std::vector<Vertex> order(g.size());
  std::iota(order.begin(), order.end(), Vertex{0});
  if (g.has_points()) {
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
      return g.point(a)[0] < g.point(b)[0];
    });
  }
  return order;
}

double log_partition_frontier(const LabeledGraph& g, const SpinSystemParams& params,
                              std::span<const Vertex> order, std::size_t state_budget) {
  params.validate();
  const std::size_t n = g.size();
  if (order.size() != n) throw std::invalid_argument("order must list every vertex once");
  std::vector<std::size_t> pos(n, n);
  for (std::size_t t = 0; t < n; ++t) {
    if (order[t] >= n || pos[order[t]] != n) {
      throw std::invalid_argument("order must be a permutation of the vertices");
    }
    pos[order[t]] = t;
  }
  // retire_at[t]: vertices whose last neighbor is processed at step t.
  std::vector<std::vector<Vertex>> retire_at(n);
  for (Vertex v = 0; v < n; ++v) {
    std::size_t last = pos[v];
    for (Vertex u : g.neighbors(v)) last = std::max(last, pos[u]);
    retire_at[last].push_back(v);
  }

  constexpr int kNoSlot = -1;
  std::vector<int> slot(n, kNoSlot);
  std::vector<int> free_slots;
  for (int s = 63; s >= 0; --s) free_slots.push_back(s);

  std::unordered_map<std::uint64_t, double> states{{0, 1.0}};
  std::unordered_map<std::uint64_t, double> next;
  double log_scale = 0.0;
  const double lambda = params.lambda;
  const double beta = params.beta;

  for (std::size_t t = 0; t < n; ++t) {
    const Vertex v = order[t];
    std::uint64_t earlier = 0;
    for (Vertex u : g.neighbors(v)) {
      if (pos[u] < t) earlier |= std::uint64_t{1} << slot[u];
    }
    const bool stays = std::find(retire_at[t].begin(), retire_at[t].end(), v) ==
                       retire_at[t].end();
    std::uint64_t own = 0;
    if (stays) {
      if (free_slots.empty()) {
        throw SizeLimitError("frontier exceeds 64 vertices");
      }
      slot[v] = free_slots.back();
      free_slots.pop_back();
      own = std::uint64_t{1} << slot[v];
    }
    next.clear();
    for (const auto& [key, w] : states) {
      next[key] += w;
      if (lambda == 0.0) continue;
      const int occ = std::popcount(key & earlier);
      if (occ > 0 && beta == 0.0) continue;
      next[key | own] += w * lambda * (occ > 0 ? std::pow(beta, occ) : 1.0);
    }
    std::swap(states, next);

    std::uint64_t clear = 0;
    for (Vertex u : retire_at[t]) {
      if (slot[u] != kNoSlot) {
        clear |= std::uint64_t{1} << slot[u];
        free_slots.push_back(slot[u]);
        slot[u] = kNoSlot;
      }
    }
    if (clear != 0) {
      next.clear();
      for (const auto& [key, w] : states) next[key & ~clear] += w;
      std::swap(states, next);
    }
    if (states.size() > state_budget) {
      throw SizeLimitError("frontier pattern count exceeds budget of " +
                           std::to_string(state_budget));
    }
    double biggest = 0.0;
    for (const auto& [key, w] : states) biggest = std::max(biggest, w);
    if (biggest > 1e200) {
      for (auto& [key, w] : states) w /= biggest;
      log_scale += std::log(biggest);
    }
  }
  double total = 0.0;
  for (const auto& [key, w] : states) total += w;
  return std::log(total) + log_scale;
}

std::vector<std::vector<std::uint64_t>> partition_polynomial(const LabeledGraph& g) {
  const std::size_t n = g.size();
  if (n > 20) {
    throw SizeLimitError("partition_polynomial supports n <= 20, got " + std::to_string(n));
  }
  const BitGraph bg(g);
  std::vector<std::vector<std::uint64_t>> c(n + 1,
                                            std::vector<std::uint64_t>(g.num_edges() + 1, 0));
  const std::uint32_t limit = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    int twice_m = 0;
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
      twice_m += std::popcount(bg.neighbors(static_cast<std::size_t>(std::countr_zero(rest))) &
                               mask);
    }
    ++c[static_cast<std::size_t>(std::popcount(mask))][static_cast<std::size_t>(twice_m / 2)];
  }
  return c;
}

double evaluate_polynomial(const std::vector<std::vector<std::uint64_t>>& c,
                           const SpinSystemParams& params) {
  params.validate();
  double z = 0.0;
  double lam_k = 1.0;
  for (const auto& row : c) {
    double beta_m = 1.0;
    for (std::uint64_t count : row) {
      z += static_cast<double>(count) * lam_k * beta_m;
      beta_m *= params.beta;
    }
    lam_k *= params.lambda;
  }
  return z;
}

double critical_fugacity(std::size_t max_degree) {
  if (max_degree < 3) throw std::invalid_argument("critical_fugacity requires degree >= 3");
  const auto d = static_cast<double>(max_degree);
  if ((d - 1.0) * std::log10(d - 1.0) < 250.0) {
    // Both powers are exact in double for the small cases people check by hand.
    return std::pow(d - 1.0, d - 1.0) / std::pow(d - 2.0, d);
  }
  return std::exp((d - 1.0) * std::log(d - 1.0) - d * std::log(d - 2.0));
}

std::uint64_t default_glauber_steps(std::size_t n, double eps_tv, double constant) {
  if (!(eps_tv > 0.0)) throw std::invalid_argument("eps_tv must be positive");
  const auto nd = static_cast<double>(n);
  return static_cast<std::uint64_t>(
      std::ceil(constant * nd * std::max(1.0, std::log(nd / eps_tv))));
}

GlauberChain::GlauberChain(const LabeledGraph& g, double lambda, SpinConfiguration initial)
    : g_(&g), state_(std::move(initial)), blocked_(g.size(), 0) {
  if (state_.empty()) state_.assign(g.size(), 0);
  if (state_.size() != g.size()) throw std::invalid_argument("initial configuration length");
  if (!is_independent(g, state_)) {
    throw std::invalid_argument("initial configuration is not an independent set");
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!state_[v]) continue;
    ++occupied_;
    for (Vertex u : g.neighbors(v)) ++blocked_[u];
  }
  set_lambda(lambda);
}

void GlauberChain::set_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  lambda_ = lambda;
  const double p = lambda / (1.0 + lambda);
  threshold_ = static_cast<std::uint64_t>(std::ldexp(p, 32));
}

void GlauberChain::run(std::uint64_t steps, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(g_->size());
  if (n == 0) return;
  const auto flat = g_->flat_neighbors();
  for (std::uint64_t s = 0; s < steps; ++s) {
    const std::uint64_t r = rng();
    const auto v = static_cast<Vertex>(((r >> 32) * n) >> 32);
    if (blocked_[v] != 0) continue;  // a blocked vertex is already 0
    const std::uint8_t want = (r & 0xFFFFFFFFULL) < threshold_ ? 1 : 0;
    if (want == state_[v]) continue;
    state_[v] = want;
    const std::size_t lo = g_->offset(v);
    const std::size_t hi = g_->offset(v + 1);
    if (want) {
      ++occupied_;
      for (std::size_t i = lo; i < hi; ++i) ++blocked_[flat[i]];
    } else {
      --occupied_;
      for (std::size_t i = lo; i < hi; ++i) --blocked_[flat[i]];
    }
  }
}

SpinConfiguration glauber_sample(const LabeledGraph& g, double lambda, std::uint64_t steps,
                                 Rng& rng, SpinConfiguration initial) {
  GlauberChain chain(g, lambda, std::move(initial));
  chain.run(steps, rng);
  return chain.state();
}

SpinConfiguration exact_sample(const LabeledGraph& g, double lambda, Rng& rng) {
  if (g.size() > 26) throw SizeLimitError("exact_sample supports n <= 26");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const BitGraph bg(g);
  SpinConfiguration s(g.size(), 0);
  std::uint32_t rem = bg.all();
  for (std::size_t v = 0; v < g.size(); ++v) {
    const std::uint32_t bit = std::uint32_t{1} << v;
    if (!(rem & bit)) continue;
    const double z = bg.independence(rem, lambda);
    const double z1 = lambda * bg.independence(rem & ~bg.closed_neighbors(v), lambda);
    if (uniform01(rng) * z < z1) {
      s[v] = 1;
      rem &= ~bg.closed_neighbors(v);
    } else {
      rem &= ~bit;
    }
  }
  return s;
}

double group_failure_probability(std::size_t groups, double fail_prob) {
  if (groups == 0) throw std::invalid_argument("groups must be positive");
  if (!(fail_prob > 0.0 && fail_prob < 1.0)) {
    throw std::invalid_argument("fail_prob must lie in (0, 1)");
  }
  // The median can only leave the target band if at least half the groups do.
  const std::size_t need = (groups + 1) / 2;
  const auto tail = [&](double q) {
    double total = 0.0;
    for (std::size_t k = need; k <= groups; ++k) {
      double log_term = std::lgamma(groups + 1.0) - std::lgamma(k + 1.0) -
                        std::lgamma(static_cast<double>(groups - k) + 1.0);
      log_term += static_cast<double>(k) * std::log(q) +
                  static_cast<double>(groups - k) * std::log1p(-q);
      total += std::exp(log_term);
    }
    return total;
  };
  double lo = 0.0;
  double hi = 0.5;
  if (tail(hi) <= fail_prob) return hi;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) <= fail_prob ? lo : hi) = mid;
  }
  return lo;
}

std::vector<double> annealing_schedule(std::size_t n, double lambda) {
  if (n == 0) throw std::invalid_argument("schedule needs n >= 1");
  std::vector<double> out;
  const auto nd = static_cast<double>(n);
  const double floor_step = (lambda + 1.0) / (nd * nd);
  double cur = 0.0;
  while (cur < lambda) {
    cur = std::min(lambda, cur * (1.0 + 1.0 / nd) + floor_step);
    out.push_back(cur);
  }
  return out;
}

namespace {

// One independent run of the annealed product; returns ln of the estimate.
double annealed_log_estimate(const LabeledGraph& h, const std::vector<double>& sched,
                             const std::vector<std::uint64_t>& samples, std::uint64_t burn_in,
                             std::uint64_t thin, Rng& rng) {
  GlauberChain chain(h, sched.front());
  chain.run(burn_in, rng);
  std::uint64_t empty = 0;
  for (std::uint64_t i = 0; i < samples[0]; ++i) {
    chain.run(thin, rng);
    if (chain.occupied() == 0) ++empty;
  }
  // An all-occupied run would give p_hat = 0; half a count keeps it finite.
  const double p_hat = std::max(static_cast<double>(empty), 0.5) / static_cast<double>(samples[0]);
  double log_z = -std::log(p_hat);
  for (std::size_t k = 1; k < sched.size(); ++k) {
    if (k >= 2) {
      chain.set_lambda(sched[k - 1]);
      chain.run(thin, rng);
    }
    const double h_log = std::log(sched[k] / sched[k - 1]);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < samples[k]; ++i) {
      chain.run(thin, rng);
      acc += std::exp(h_log * static_cast<double>(chain.occupied()));
    }
    log_z += std::log(acc / static_cast<double>(samples[k]));
  }
  return log_z;
}

}  // namespace

Estimate estimate_partition(const LabeledGraph& g, double lambda, double eps, double fail_prob,
                            Rng& rng, const EstimatorOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and nonnegative");
  }
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  Estimate est;
  est.rel_error_target = eps;
  est.confidence = 1.0 - fail_prob;
  est.replicates = options.groups;
  const double q = group_failure_probability(options.groups, fail_prob);

  if (lambda == 0.0) {
    est.value = 1.0;
    est.std_error = 0.0;
    return est;
  }
  const std::size_t delta = max_degree(g);
  if (delta >= 3 && lambda > critical_fugacity(delta)) {
    est.valid = false;
    est.reason = "above_tree_threshold";
  }

  std::vector<Vertex> core;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (g.degree(v) > 0) core.push_back(v);
  }
  const double log_isolated =
      static_cast<double>(g.size() - core.size()) * std::log1p(lambda);
  if (core.empty()) {
    est.value = std::exp(log_isolated);
    est.std_error = 0.0;
    return est;
  }
  const LabeledGraph h = induced_subgraph(g, core);
  const std::size_t n = h.size();
  const auto nd = static_cast<double>(n);
  const auto sched = annealing_schedule(n, lambda);
  const std::size_t stages = sched.size();

  // Variance proxies for each stage's estimator.
  std::vector<double> relvar(stages);
  relvar[0] = std::expm1(nd * std::log1p(sched[0]));
  for (std::size_t k = 1; k < stages; ++k) {
    const double r = sched[k] / sched[k - 1];
    const double top = sched[k] * r;
    const double v = nd * top / (1.0 + top);
    const double h_log = std::log(r);
    relvar[k] = 2.0 * std::expm1(v * h_log * h_log);
  }
  const double budget = std::log1p(eps * eps * q);
  std::vector<std::uint64_t> samples(stages);
  for (std::size_t k = 0; k < stages; ++k) {
    const double want = std::ceil(relvar[k] * static_cast<double>(stages) / budget);
    samples[k] = static_cast<std::uint64_t>(std::max(2.0, want));
  }
  const std::uint64_t thin = options.thinning > 0 ? options.thinning : n;
  const std::uint64_t burn_in =
      options.burn_in > 0 ? options.burn_in
                          : default_glauber_steps(n, eps, options.glauber_constant);

  std::vector<std::uint64_t> seeds(options.groups);
  for (auto& s : seeds) s = rng();
  std::vector<double> logs(options.groups);
  for (std::size_t gi = 0; gi < options.groups; ++gi) {
    Rng stream(seeds[gi]);
    logs[gi] = annealed_log_estimate(h, sched, samples, burn_in, thin, stream);
  }
  std::vector<double> sorted = logs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median_log =
      m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  est.value = std::exp(median_log + log_isolated);

  double mean = 0.0;
  for (double l : logs) mean += std::exp(l + log_isolated);
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double l : logs) {
    const double d = std::exp(l + log_isolated) - mean;
    ss += d * d;
  }
  est.std_error = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m))
                        : std::numeric_limits<double>::quiet_NaN();
  return est;
}

double occupation_ratio_exact(const LabeledGraph& g, double lambda, Vertex v,
                              const Pinning& pinning) {
  if (g.size() > 26) throw SizeLimitError("occupation_ratio_exact supports n <= 26");
  if (v >= g.size()) throw std::invalid_argument("vertex out of range");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const BitGraph bg(g);
  std::uint32_t ones = 0;
  std::uint32_t pinned = 0;
  for (const auto& [u, spin] : pinning) {
    if (u >= g.size()) throw std::invalid_argument("pinned vertex out of range");
    if (u == v) throw std::invalid_argument("the queried vertex is pinned");
    const std::uint32_t bit = std::uint32_t{1} << u;
    if (pinned & bit) throw std::invalid_argument("vertex pinned twice");
    pinned |= bit;
    if (spin > 1) throw std::invalid_argument("pinned spin must be 0 or 1");
    if (spin == 1) ones |= bit;
  }
  for (std::uint32_t rest = ones; rest != 0; rest &= rest - 1) {
    if (bg.neighbors(static_cast<std::size_t>(std::countr_zero(rest))) & ones) {
      throw std::invalid_argument("infeasible pinning: two adjacent vertices pinned to 1");
    }
  }
  if (ones != 0 && lambda == 0.0) {
    throw std::invalid_argument("infeasible pinning: occupied vertex at lambda = 0");
  }
  std::uint32_t rem = bg.all() & ~pinned;
  for (std::uint32_t rest = ones; rest != 0; rest &= rest - 1) {
    rem &= ~bg.neighbors(static_cast<std::size_t>(std::countr_zero(rest)));
  }
  const std::uint32_t vbit = std::uint32_t{1} << v;
  if (!(rem & vbit)) return 0.0;  // a neighbor is pinned to 1
  return lambda * bg.independence(rem & ~bg.closed_neighbors(v), lambda) /
         bg.independence(rem & ~vbit, lambda);
}

}  // namespace gibbsgraph
