#include "gibbsgraph/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "gibbsgraph/hardcore.hpp"
#include "gibbsgraph/parallel.hpp"
#include "gibbsgraph/stats.hpp"
#include "gibbsgraph/weitz.hpp"

namespace gibbsgraph {
namespace {

// ---- spec parsing ---------------------------------------------------------

std::string type_error(const char* key, const std::exception& e) {
  return std::string("field '") + key + "' has the wrong type: " + e.what();
}

bool present(const Json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

double real_field(const Json& j, const char* key, double def) {
  if (!present(j, key)) return def;
  if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::uint64_t count_field(const Json& j, const char* key, std::uint64_t def) {
  if (!present(j, key)) return def;
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
}

std::vector<double> real_list(const Json& j, const char* key, std::vector<double> def) {
  if (!present(j, key)) return def;
  std::vector<double> out;
  try {
    out = j.at(key).get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw ConfigError(type_error(key, e));
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string string_field(const Json& j, const char* key) {
  require(j.at(key).is_string(), std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

bool needs_instance(ExperimentKind k) {
  return k == ExperimentKind::concentration || k == ExperimentKind::approximate_z ||
         k == ExperimentKind::sample_validate || k == ExperimentKind::connective;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "kind", "seed", "instance", "n", "trials", "eps", "delta", "beta", "size_mode", "slack",
      "oracle", "oracle_check", "estimator", "min_success_fraction", "draws", "sampler",
      "glauber_constant", "sub_box", "tv_threshold", "void_sigma", "dkw_alpha", "graphs",
      "n_max", "lambdas", "betas", "calibration_graphs", "test_graphs", "growth_eps", "a",
      "k_max", "pwcc_samples", "pass_fraction", "node_budget", "paths", "ssm_lambda",
      "distances", "pinning_budget", "comment"};
  return keys;
}

// ---- helpers shared by the runners ----------------------------------------

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

OracleOptions oracle_options(const ExperimentSpec& spec) {
  OracleOptions o;
  o.truncation = spec.oracle_truncation;
  o.eps = spec.oracle_eps;
  o.samples_per_order = spec.oracle_samples;
  return o;
}

Json oracle_row(const OracleResult& r, std::size_t replicate) {
  Json row;
  row["type"] = "oracle";
  row["replicate"] = replicate;
  row["value"] = number_or_null(r.estimate.value);
  row["std_error"] = number_or_null(r.estimate.std_error);
  row["truncation"] = r.truncation;
  row["tail_bound"] = r.tail_bound;
  row["order_mean"] = r.order_mean;
  row["order_se"] = r.order_se;
  row["terms"] = r.terms;
  row["term_se"] = r.term_se;
  return row;
}

OracleResult oracle_from_row(const Json& row) {
  OracleResult r;
  r.estimate.value = row.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                               : row.at("value").get<double>();
  r.estimate.std_error = row.at("std_error").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                       : row.at("std_error").get<double>();
  r.truncation = row.at("truncation").get<std::size_t>();
  r.tail_bound = row.at("tail_bound").get<double>();
  r.order_mean = row.at("order_mean").get<std::vector<double>>();
  r.order_se = row.at("order_se").get<std::vector<double>>();
  r.terms = row.at("terms").get<std::vector<double>>();
  r.term_se = row.at("term_se").get<std::vector<double>>();
  return r;
}

std::vector<const Json*> rows_of_type(const std::vector<Json>& rows, const char* type) {
  std::vector<const Json*> out;
  for (const auto& r : rows) {
    if (r.value("type", std::string()) == type) out.push_back(&r);
  }
  return out;
}

const Json* single_row(const std::vector<Json>& rows, const char* type) {
  const auto v = rows_of_type(rows, type);
  if (v.size() > 1) throw ConfigError(std::string("more than one '") + type + "' row");
  return v.empty() ? nullptr : v.front();
}

double get_or_nan(const Json& row, const char* key) {
  return present(row, key) ? row.at(key).get<double>() : std::numeric_limits<double>::quiet_NaN();
}

void sort_rows(std::vector<Json>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const Json& a, const Json& b) {
    return a.at("replicate").get<std::uint64_t>() < b.at("replicate").get<std::uint64_t>();
  });
}

// ---- concentration --------------------------------------------------------

Json concentration_trial(const ExperimentSpec& spec, std::size_t i) {
  const auto start = Clock::now();
  const GPPInstance& inst = *spec.instance;
  Rng rng = make_stream(spec.seed, i);
  const LabeledGraph g = sample_graph(inst.region(), inst.potential(), spec.n, rng,
                                      derive_seed(spec.seed, i));
  const double lambda_n = inst.lambda_volume() / static_cast<double>(spec.n);
  const SpinSystemParams params{lambda_n, spec.beta};
  double log_z = 0.0;
  std::string method;
  const bool exact_ok = spec.beta == 0.0 ? g.size() <= 30 : g.size() <= 20;
  if (exact_ok) {
    log_z = std::log(partition_exact(g, params));
    method = "exact";
  } else {
    try {
      const auto order = coordinate_order(g);
      log_z = log_partition_frontier(g, params, order);
      method = "frontier";
    } catch (const SizeLimitError&) {
      if (spec.beta != 0.0) throw;
      const Estimate e = estimate_partition(g, lambda_n, spec.estimator_eps,
                                            spec.estimator_fail_prob, rng);
      log_z = std::log(e.value);
      method = "estimate";
    }
  }
  Json row;
  row["type"] = "trial";
  row["replicate"] = i;
  row["z"] = std::exp(log_z);
  row["log_z"] = log_z;
  row["method"] = method;
  row["max_degree"] = max_degree(g);
  row["edges"] = g.num_edges();
  row["wall_ms"] = elapsed_ms(start);
  return row;
}

Json summarize_concentration(const ExperimentSpec& spec, const std::vector<Json>& rows) {
  const auto trials = rows_of_type(rows, "trial");
  stats::RunningStats acc;
  for (const Json* r : trials) acc.add(r->at("z").get<double>());
  const double mean = acc.mean();
  std::size_t failures = 0;
  for (const Json* r : trials) {
    if (std::abs(r->at("z").get<double>() - mean) >= spec.eps * mean) ++failures;
  }
  const double rate =
      trials.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(trials.size());
  const double lv = spec.instance->lambda_volume();
  const double c = efron_stein_constant(lv, spec.n);
  const double bound = chebyshev_failure_bound(c, spec.eps);
  const bool bound_void = !std::isfinite(bound);

  Json s;
  s["trials"] = trials.size();
  s["mean"] = mean;
  s["variance"] = acc.variance();
  s["relative_variance"] = mean > 0.0 ? acc.variance() / (mean * mean) : 0.0;
  s["failures"] = failures;
  s["failure_rate"] = rate;
  s["efron_stein_c"] = c;
  s["bound"] = number_or_null(bound);
  s["bound_void"] = bound_void;
  s["slack"] = spec.slack;
  s["threshold"] = number_or_null(spec.slack * bound);
  bool passed = bound_void || rate <= spec.slack * bound;
  s["bound_passed"] = passed;

  if (const Json* o = single_row(rows, "oracle")) {
    const OracleResult oracle = oracle_from_row(*o);
    const auto [expected, expected_se] = expected_partition_from_oracle(oracle, lv, spec.n);
    const double mean_se = acc.std_error();
    const double combined = std::hypot(mean_se, expected_se);
    const double gap = mean - expected;
    const bool ok = std::abs(gap) <= 3.0 * combined;
    Json e;
    e["expected_z"] = expected;
    e["expected_z_se"] = expected_se;
    e["mean_se"] = mean_se;
    e["combined_se"] = combined;
    e["z_score"] = combined > 0.0 ? gap / combined : 0.0;
    e["xi"] = number_or_null(oracle.estimate.value);
    e["mean_at_most_xi"] = mean <= oracle.estimate.value + 3.0 * oracle.estimate.std_error;
    e["passed"] = ok;
    s["expectation"] = e;
    passed = passed && ok;
  }
  s["passed"] = passed;
  return s;
}

std::vector<Json> run_concentration(const ExperimentSpec& spec) {
  std::vector<Json> rows(spec.trials);
  parallel_for(spec.trials, [&](std::size_t i) { rows[i] = concentration_trial(spec, i); });
  if (spec.oracle_check) {
    Rng rng = make_stream(spec.seed, kOracleStream);
    rows.push_back(oracle_row(oracle_partition(*spec.instance, oracle_options(spec), rng),
                              spec.trials));
  }
  return rows;
}

// ---- approximate_z --------------------------------------------------------

std::vector<Json> run_approximate_z(const ExperimentSpec& spec) {
  std::vector<Json> rows(spec.trials + 1);
  EstimatorOptions est;
  est.groups = spec.estimator_groups;
  est.glauber_constant = spec.glauber_constant;
  parallel_for(spec.trials + 1, [&](std::size_t i) {
    const auto start = Clock::now();
    if (i == spec.trials) {
      Rng rng = make_stream(spec.seed, kOracleStream);
      rows[i] = oracle_row(oracle_partition(*spec.instance, oracle_options(spec), rng), i);
      rows[i]["wall_ms"] = elapsed_ms(start);
      return;
    }
    Rng rng = make_stream(spec.seed, i);
    const auto r = approximate_partition(*spec.instance, spec.eps, rng, spec.size_mode, spec.n, est);
    Json row;
    row["type"] = "trial";
    row["replicate"] = i;
    row["value"] = number_or_null(r.estimate.value);
    row["std_error"] = number_or_null(r.estimate.std_error);
    row["valid"] = r.estimate.valid;
    if (!r.estimate.reason.empty()) row["reason"] = r.estimate.reason;
    row["n"] = r.n;
    row["theoretical_n"] = number_or_null(r.theoretical_n);
    row["max_degree"] = r.max_degree;
    row["wall_ms"] = elapsed_ms(start);
    rows[i] = std::move(row);
  });
  return rows;
}

Json summarize_approximate_z(const ExperimentSpec& spec, const std::vector<Json>& rows) {
  const Json* o = single_row(rows, "oracle");
  if (!o) throw ConfigError("approximate_z rows lack the oracle row");
  const double xi = get_or_nan(*o, "value");
  const auto trials = rows_of_type(rows, "trial");
  std::size_t successes = 0;
  std::size_t degree_failures = 0;
  std::size_t flagged = 0;
  Json errors = Json::array();
  for (const Json* r : trials) {
    if (r->value("reason", std::string()) == "degree") ++degree_failures;
    if (!r->at("valid").get<bool>()) ++flagged;
    const double v = get_or_nan(*r, "value");
    const double rel = std::abs(v - xi) / xi;
    errors.push_back(number_or_null(rel));
    if (std::isfinite(v) && rel <= spec.eps) ++successes;
  }
  const auto required = static_cast<std::size_t>(
      std::ceil(spec.min_success_fraction * static_cast<double>(trials.size()) - 1e-9));
  Json s;
  s["oracle_value"] = number_or_null(xi);
  s["oracle_std_error"] = (*o)["std_error"];
  s["oracle_tail_bound"] = (*o)["tail_bound"];
  s["trials"] = trials.size();
  s["successes"] = successes;
  s["required"] = required;
  s["degree_failures"] = degree_failures;
  s["invalid"] = flagged;
  s["relative_errors"] = errors;
  s["passed"] = successes >= required;
  return s;
}

// ---- sample_validate ------------------------------------------------------

Box default_sub_box(const Region& region) {
  std::vector<double> lo(region.dim(), 0.0);
  std::vector<double> hi;
  for (double side : region.sides()) hi.push_back(0.1 * side);
  return Box{Point(std::span<const double>(lo)), Point(std::span<const double>(hi))};
}

std::vector<Json> run_sample_validate(const ExperimentSpec& spec) {
  const GPPInstance& inst = *spec.instance;
  const Box box = spec.sub_box ? *spec.sub_box : default_sub_box(inst.region());
  std::vector<Json> rows(spec.draws + 2);
  parallel_for(spec.draws + 2, [&](std::size_t i) {
    const auto start = Clock::now();
    if (i == spec.draws) {
      Rng rng = make_stream(spec.seed, kOracleStream);
      rows[i] = oracle_row(oracle_partition(inst, oracle_options(spec), rng), i);
      rows[i]["wall_ms"] = elapsed_ms(start);
      return;
    }
    if (i == spec.draws + 1) {
      Rng rng = make_stream(spec.seed, kVoidOracleStream);
      const Estimate e = void_probability_oracle(inst, box, oracle_options(spec), rng);
      Json row;
      row["type"] = "void_oracle";
      row["replicate"] = i;
      row["value"] = number_or_null(e.value);
      row["std_error"] = number_or_null(e.std_error);
      row["box"] = to_json(box);
      row["wall_ms"] = elapsed_ms(start);
      rows[i] = std::move(row);
      return;
    }
    Rng rng = make_stream(spec.seed, i);
    const auto r = sample_configuration(inst, spec.eps, rng, spec.size_mode, spec.n, spec.sampler,
                                        spec.glauber_constant);
    std::size_t in_box = 0;
    for (const auto& p : r.configuration) {
      if (box.contains(p)) ++in_box;
    }
    Json row;
    row["type"] = "draw";
    row["replicate"] = i;
    row["count"] = r.configuration.size();
    row["in_box"] = in_box;
    row["degree_failure"] = r.degree_failure;
    row["wall_ms"] = elapsed_ms(start);
    rows[i] = std::move(row);
  });
  return rows;
}

Json summarize_sample_validate(const ExperimentSpec& spec, const std::vector<Json>& rows) {
  const Json* o = single_row(rows, "oracle");
  const Json* vo = single_row(rows, "void_oracle");
  if (!o || !vo) throw ConfigError("sample_validate rows lack the oracle rows");
  const OracleResult oracle = oracle_from_row(*o);
  const auto draws = rows_of_type(rows, "draw");
  if (draws.empty()) throw ConfigError("sample_validate rows contain no draws");

  std::size_t max_count = 0;
  std::size_t voids = 0;
  std::size_t degree_failures = 0;
  for (const Json* r : draws) {
    max_count = std::max(max_count, r->at("count").get<std::size_t>());
    if (r->at("in_box").get<std::size_t>() == 0) ++voids;
    if (r->at("degree_failure").get<bool>()) ++degree_failures;
  }
  const double total = static_cast<double>(draws.size());
  const std::size_t cells = std::max(max_count, oracle.truncation) + 1;
  std::vector<double> hist(cells, 0.0);
  for (const Json* r : draws) hist[r->at("count").get<std::size_t>()] += 1.0;
  std::vector<double> empirical(cells);
  for (std::size_t k = 0; k < cells; ++k) empirical[k] = hist[k] / total;

  double term_sum = 0.0;
  double term_err = 0.0;
  for (std::size_t k = 0; k < oracle.terms.size(); ++k) {
    term_sum += oracle.terms[k];
    term_err += oracle.term_se[k];
  }
  std::vector<double> law(cells, 0.0);
  for (std::size_t k = 0; k < oracle.terms.size(); ++k) law[k] = oracle.terms[k] / term_sum;
  const double tv = stats::total_variation(empirical, law);
  const double oracle_tv_uncertainty = (2.0 * term_err + oracle.tail_bound) / term_sum;
  const bool inconclusive = oracle_tv_uncertainty > spec.tv_threshold / 4.0;

  const double p_hat = static_cast<double>(voids) / total;
  const double emp_se = std::sqrt(p_hat * (1.0 - p_hat) / total);
  const double void_oracle = get_or_nan(*vo, "value");
  const double void_oracle_se = get_or_nan(*vo, "std_error");
  const double combined = std::hypot(emp_se, void_oracle_se);
  const double void_gap = p_hat - void_oracle;
  const bool void_ok = std::abs(void_gap) <= spec.void_sigma * combined;

  const double lv = spec.instance->lambda_volume();
  const double band = stats::dkw_epsilon(draws.size(), spec.dkw_alpha);
  double worst = std::numeric_limits<double>::infinity();
  double cdf = 0.0;
  for (std::size_t k = 0; k <= max_count; ++k) {
    cdf += empirical[k];
    worst = std::min(worst, cdf - stats::poisson_cdf(lv, k));
  }
  const bool dom_ok = worst >= -band;

  Json s;
  s["draws"] = draws.size();
  s["degree_failures"] = degree_failures;
  s["count_tv"] = tv;
  s["tv_threshold"] = spec.tv_threshold;
  s["oracle_tv_uncertainty"] = oracle_tv_uncertainty;
  s["inconclusive"] = inconclusive;
  s["tv_passed"] = tv <= spec.tv_threshold;
  s["empirical_counts"] = hist;
  s["oracle_law"] = law;
  s["void_empirical"] = p_hat;
  s["void_empirical_se"] = emp_se;
  s["void_oracle"] = number_or_null(void_oracle);
  s["void_oracle_se"] = number_or_null(void_oracle_se);
  s["void_combined_se"] = combined;
  s["void_z"] = combined > 0.0 ? void_gap / combined : 0.0;
  s["void_oracle_z"] = void_oracle_se > 0.0 ? void_gap / void_oracle_se : 0.0;
  s["void_passed"] = void_ok;
  s["box"] = (*vo)["box"];
  s["poisson_min_gap"] = worst;
  s["dkw_band"] = band;
  s["domination_passed"] = dom_ok;
  s["passed"] = !inconclusive && tv <= spec.tv_threshold && void_ok && dom_ok;
  return s;
}

// ---- lemma_suite ----------------------------------------------------------

Json tally_json(const LemmaTally& t) { return {{"checks", t.checks}, {"violations", t.violations}}; }

std::vector<Json> run_lemma_suite(const ExperimentSpec& spec) {
  std::vector<Json> rows(spec.graphs);
  parallel_for(spec.graphs, [&](std::size_t i) {
    const auto start = Clock::now();
    Rng rng = make_stream(spec.seed, i);
    const LabeledGraph g = lemma_corpus_graph(i, spec.n_max, rng);
    const LemmaReport rep = check_lemmas(g, spec.lambdas, spec.betas, rng);
    Json row;
    row["type"] = "graph";
    row["replicate"] = i;
    row["family"] = i % 2 == 0 ? "erdos_renyi" : "geometric";
    row["n"] = g.size();
    row["edges"] = g.num_edges();
    row["remove_edge"] = tally_json(rep.remove_edge);
    row["add_vertex"] = tally_json(rep.add_vertex);
    row["hardcore_bounds"] = tally_json(rep.hardcore_bounds);
    row["domination"] = tally_json(rep.domination);
    row["wall_ms"] = elapsed_ms(start);
    rows[i] = std::move(row);
  });
  return rows;
}

Json summarize_lemma_suite(const ExperimentSpec&, const std::vector<Json>& rows) {
  const auto graphs = rows_of_type(rows, "graph");
  Json s;
  s["graphs"] = graphs.size();
  std::size_t total_violations = 0;
  for (const char* name : {"remove_edge", "add_vertex", "hardcore_bounds", "domination"}) {
    std::uint64_t checks = 0;
    std::uint64_t violations = 0;
    for (const Json* r : graphs) {
      checks += r->at(name).at("checks").get<std::uint64_t>();
      violations += r->at(name).at("violations").get<std::uint64_t>();
    }
    s[name] = {{"checks", checks}, {"violations", violations}};
    total_violations += violations;
  }
  s["violations"] = total_violations;
  s["passed"] = total_violations == 0;
  return s;
}

// ---- connective -----------------------------------------------------------

std::size_t path_length(double a, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(a * std::log(static_cast<double>(n)) - 1e-12));
}

std::vector<Json> run_connective(const ExperimentSpec& spec) {
  const GPPInstance& inst = *spec.instance;
  const std::size_t total = spec.calibration_graphs + spec.test_graphs;
  const std::size_t m = std::max<std::size_t>(1, path_length(spec.a, spec.n));
  std::vector<Json> rows(total + 1);
  parallel_for(total + 1, [&](std::size_t i) {
    const auto start = Clock::now();
    if (i == total) {
      Rng rng = make_stream(spec.seed, kPwccStream);
      const auto p = pwcc_estimate(inst.potential(), static_cast<int>(inst.region().dim()),
                                   spec.k_max, spec.pwcc_samples, rng);
      Json row;
      row["type"] = "pwcc";
      row["replicate"] = i;
      row["value"] = p.estimate.value;
      row["std_error"] = number_or_null(p.estimate.std_error);
      row["best_k"] = p.best_k;
      row["roots"] = p.roots;
      row["root_se"] = p.root_se;
      row["wall_ms"] = elapsed_ms(start);
      rows[i] = std::move(row);
      return;
    }
    Rng rng = make_stream(spec.seed, i);
    const LabeledGraph g = sample_graph(inst.region(), inst.potential(), spec.n, rng,
                                        derive_seed(spec.seed, i));
    const auto ordering = distance_ordering(g);
    // With target 1 and c 1 the check just reports ln sum_{k<=m} L_k per root.
    const auto check = connective_bound_check(g, ordering, m, 1.0, 1.0, spec.a, spec.node_budget);
    Json row;
    row["type"] = "graph";
    row["replicate"] = i;
    row["set"] = i < spec.calibration_graphs ? "calibration" : "test";
    row["m"] = m;
    row["max_log_sum"] = *std::max_element(check.log_sums.begin(), check.log_sums.end());
    row["truncated_roots"] = check.truncated_roots;
    row["max_degree"] = max_degree(g);
    row["edges"] = g.num_edges();
    row["wall_ms"] = elapsed_ms(start);
    rows[i] = std::move(row);
  });
  return rows;
}

Json summarize_connective(const ExperimentSpec& spec, const std::vector<Json>& rows) {
  const Json* p = single_row(rows, "pwcc");
  if (!p) throw ConfigError("connective rows lack the pwcc row");
  const double delta_phi = p->at("value").get<double>();
  const double volume = spec.instance->volume();
  const double target = delta_phi > 0.0
                            ? std::exp(spec.growth_eps) * static_cast<double>(spec.n) * delta_phi / volume
                            : 1.0;
  const double log_target = std::log(target);
  double log_c = -std::numeric_limits<double>::infinity();
  std::size_t calibration = 0;
  for (const Json* r : rows_of_type(rows, "graph")) {
    if (r->at("set").get<std::string>() != "calibration") continue;
    ++calibration;
    const double excess = r->at("max_log_sum").get<double>() -
                          static_cast<double>(r->at("m").get<std::size_t>()) * log_target;
    log_c = std::max(log_c, excess);
  }
  if (calibration == 0) log_c = 0.0;
  std::size_t tests = 0;
  std::size_t passes = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const Json* r : rows_of_type(rows, "graph")) {
    if (r->at("set").get<std::string>() != "test") continue;
    ++tests;
    const double excess = r->at("max_log_sum").get<double>() -
                          static_cast<double>(r->at("m").get<std::size_t>()) * log_target;
    worst = std::max(worst, excess - log_c);
    if (r->at("truncated_roots").get<std::size_t>() == 0 &&
        excess <= log_c + std::log(spec.slack)) {
      ++passes;
    }
  }
  const double fraction = tests == 0 ? 1.0 : static_cast<double>(passes) / static_cast<double>(tests);
  Json s;
  s["delta_phi"] = delta_phi;
  s["delta_phi_se"] = (*p)["std_error"];
  s["target"] = target;
  s["fitted_c"] = std::exp(log_c);
  s["slack"] = spec.slack;
  s["calibration_graphs"] = calibration;
  s["test_graphs"] = tests;
  s["passes"] = passes;
  s["pass_fraction"] = fraction;
  s["required_fraction"] = spec.pass_fraction;
  s["worst_log_ratio_to_c"] = number_or_null(worst);
  s["passed"] = fraction >= spec.pass_fraction;
  return s;
}

// ---- ssm ------------------------------------------------------------------

std::vector<Json> run_ssm(const ExperimentSpec& spec) {
  std::vector<std::vector<Json>> per_path(spec.paths.size());
  parallel_for(spec.paths.size(), [&](std::size_t gi) {
    const auto start = Clock::now();
    const PathSpec& ps = spec.paths[gi];
    const LabeledGraph g = path_graph(ps.n);
    Rng rng = make_stream(spec.seed, gi);
    const auto table =
        ssm_decay_table(g, spec.ssm_lambda, ps.root, spec.distances, rng, spec.pinning_budget);
    const double ms = elapsed_ms(start);
    for (std::size_t t = 0; t < table.size(); ++t) {
      Json row;
      row["type"] = "ssm";
      row["replicate"] = gi * spec.distances.size() + t;
      row["graph"] = gi;
      row["n"] = ps.n;
      row["root"] = ps.root;
      row["distance"] = table[t].distance;
      row["gap"] = table[t].gap;
      row["sphere_size"] = table[t].sphere_size;
      row["pinnings"] = table[t].pinnings;
      row["sampled"] = table[t].sampled;
      row["wall_ms"] = ms;
      per_path[gi].push_back(std::move(row));
    }
  });
  std::vector<Json> rows;
  for (auto& v : per_path) {
    for (auto& r : v) rows.push_back(std::move(r));
  }
  return rows;
}

Json summarize_ssm(const ExperimentSpec&, const std::vector<Json>& rows) {
  std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> by_graph;
  std::map<std::size_t, Json> label;
  for (const Json* r : rows_of_type(rows, "ssm")) {
    const auto gi = r->at("graph").get<std::size_t>();
    by_graph[gi].emplace_back(r->at("distance").get<std::size_t>(), r->at("gap").get<double>());
    label[gi] = {{"n", r->at("n")}, {"root", r->at("root")}};
  }
  Json graphs = Json::array();
  bool all = true;
  for (auto& [gi, gaps] : by_graph) {
    std::sort(gaps.begin(), gaps.end());
    bool decreasing = true;
    for (std::size_t t = 1; t < gaps.size(); ++t) {
      if (!(gaps[t].second < gaps[t - 1].second)) decreasing = false;
    }
    Json gj = label[gi];
    Json gl = Json::array();
    for (const auto& [s, gap] : gaps) gl.push_back({s, gap});
    gj["gaps"] = gl;
    gj["strictly_decreasing"] = decreasing;
    graphs.push_back(gj);
    all = all && decreasing;
  }
  Json s;
  s["graphs"] = graphs;
  s["passed"] = all;
  return s;
}

}  // namespace

// ---- public API -----------------------------------------------------------

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::concentration: return "concentration";
    case ExperimentKind::approximate_z: return "approximate_z";
    case ExperimentKind::sample_validate: return "sample_validate";
    case ExperimentKind::lemma_suite: return "lemma_suite";
    case ExperimentKind::connective: return "connective";
    case ExperimentKind::ssm: return "ssm";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::concentration, ExperimentKind::approximate_z,
                 ExperimentKind::sample_validate, ExperimentKind::lemma_suite,
                 ExperimentKind::connective, ExperimentKind::ssm}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown experiment kind \"" + s + "\"");
}

Json ExperimentSpec::resolved() const {
  Json j;
  j["kind"] = to_string(kind);
  j["seed"] = seed;
  j["instance"] = instance ? to_json(*instance) : Json(nullptr);
  j["n"] = n;
  j["trials"] = trials;
  j["eps"] = eps;
  j["delta"] = delta;
  j["beta"] = beta;
  j["size_mode"] = size_mode == SizeMode::theoretical ? "theoretical" : "practical";
  j["slack"] = slack;
  j["oracle"] = {{"samples_per_order", oracle_samples},
                 {"truncation", oracle_truncation ? Json(*oracle_truncation) : Json(nullptr)},
                 {"eps", oracle_eps}};
  j["oracle_check"] = oracle_check;
  j["estimator"] = {{"eps", estimator_eps}, {"fail_prob", estimator_fail_prob}, {"groups", estimator_groups}};
  j["min_success_fraction"] = min_success_fraction;
  j["draws"] = draws;
  j["sampler"] = sampler == HardcoreSampler::exact ? "exact" : "glauber";
  j["glauber_constant"] = glauber_constant;
  j["sub_box"] = sub_box ? to_json(*sub_box) : Json(nullptr);
  j["tv_threshold"] = tv_threshold;
  j["void_sigma"] = void_sigma;
  j["dkw_alpha"] = dkw_alpha;
  j["graphs"] = graphs;
  j["n_max"] = n_max;
  j["lambdas"] = lambdas;
  j["betas"] = betas;
  j["calibration_graphs"] = calibration_graphs;
  j["test_graphs"] = test_graphs;
  j["growth_eps"] = growth_eps;
  j["a"] = a;
  j["k_max"] = k_max;
  j["pwcc_samples"] = pwcc_samples;
  j["pass_fraction"] = pass_fraction;
  j["node_budget"] = node_budget;
  Json paths_j = Json::array();
  for (const auto& p : paths) paths_j.push_back({{"n", p.n}, {"root", p.root}});
  j["paths"] = paths_j;
  j["ssm_lambda"] = ssm_lambda;
  j["distances"] = distances;
  j["pinning_budget"] = pinning_budget;
  return j;
}

ExperimentSpec parse_experiment_spec(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().count(key)) throw ConfigError("unknown experiment field '" + key + "'");
  }
  if (!present(j, "kind")) throw ConfigError("missing required field 'kind'");
  if (!j.at("kind").is_string()) throw ConfigError("field 'kind' must be a string");

  ExperimentSpec s;
  s.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
  s.seed = count_field(j, "seed", 0);
  if (present(j, "instance")) s.instance = instance_from_json(j.at("instance"));
  if (needs_instance(s.kind) && !s.instance) {
    throw ConfigError("experiment kind " + to_string(s.kind) + " needs an 'instance'");
  }

  s.n = count_field(j, "n", s.n);
  s.trials = count_field(j, "trials", s.trials);
  s.eps = real_field(j, "eps", s.eps);
  s.delta = real_field(j, "delta", s.delta);
  s.beta = real_field(j, "beta", s.beta);
  if (present(j, "size_mode")) {
    const auto m = string_field(j, "size_mode");
    require(m == "theoretical" || m == "practical", "size_mode must be \"theoretical\" or \"practical\"");
    s.size_mode = m == "theoretical" ? SizeMode::theoretical : SizeMode::practical;
  }
  s.slack = real_field(j, "slack", s.slack);

  if (present(j, "oracle")) {
    const auto& o = j.at("oracle");
    require(o.is_object(), "field 'oracle' must be an object");
    s.oracle_samples = count_field(o, "samples_per_order", s.oracle_samples);
    if (present(o, "truncation")) s.oracle_truncation = count_field(o, "truncation", 0);
    s.oracle_eps = real_field(o, "eps", s.oracle_eps);
  }
  if (present(j, "oracle_check")) {
    require(j.at("oracle_check").is_boolean(), "field 'oracle_check' must be a boolean");
    s.oracle_check = j.at("oracle_check").get<bool>();
  }
  if (present(j, "estimator")) {
    const auto& e = j.at("estimator");
    require(e.is_object(), "field 'estimator' must be an object");
    s.estimator_eps = real_field(e, "eps", s.estimator_eps);
    s.estimator_fail_prob = real_field(e, "fail_prob", s.estimator_fail_prob);
    s.estimator_groups = count_field(e, "groups", s.estimator_groups);
  }
  s.min_success_fraction = real_field(j, "min_success_fraction", s.min_success_fraction);

  s.draws = count_field(j, "draws", s.draws);
  if (present(j, "sampler")) {
    const auto m = string_field(j, "sampler");
    require(m == "glauber" || m == "exact", "sampler must be \"glauber\" or \"exact\"");
    s.sampler = m == "exact" ? HardcoreSampler::exact : HardcoreSampler::glauber;
  }
  s.glauber_constant = real_field(j, "glauber_constant", s.glauber_constant);
  if (present(j, "sub_box")) s.sub_box = box_from_json(j.at("sub_box"));
  s.tv_threshold = real_field(j, "tv_threshold", s.tv_threshold);
  s.void_sigma = real_field(j, "void_sigma", s.void_sigma);
  s.dkw_alpha = real_field(j, "dkw_alpha", s.dkw_alpha);

  s.graphs = count_field(j, "graphs", s.graphs);
  s.n_max = count_field(j, "n_max", s.n_max);
  s.lambdas = real_list(j, "lambdas", s.lambdas);
  s.betas = real_list(j, "betas", s.betas);

  s.calibration_graphs = count_field(j, "calibration_graphs", s.calibration_graphs);
  s.test_graphs = count_field(j, "test_graphs", s.test_graphs);
  s.growth_eps = real_field(j, "growth_eps", s.growth_eps);
  s.a = real_field(j, "a", s.a);
  s.k_max = count_field(j, "k_max", s.k_max);
  s.pwcc_samples = count_field(j, "pwcc_samples", s.pwcc_samples);
  s.pass_fraction = real_field(j, "pass_fraction", s.pass_fraction);
  s.node_budget = count_field(j, "node_budget", s.node_budget);

  if (present(j, "paths")) {
    require(j.at("paths").is_array(), "field 'paths' must be an array");
    s.paths.clear();
    for (const auto& p : j.at("paths")) {
      require(p.is_object(), "each path must be an object {n, root}");
      PathSpec ps;
      ps.n = count_field(p, "n", 0);
      ps.root = static_cast<Vertex>(count_field(p, "root", 0));
      require(ps.n >= 1 && ps.root < ps.n, "path root must be a vertex of the path");
      s.paths.push_back(ps);
    }
  }
  s.ssm_lambda = real_field(j, "ssm_lambda", s.ssm_lambda);
  if (present(j, "distances")) {
    s.distances.clear();
    require(j.at("distances").is_array(), "field 'distances' must be an array");
    for (const auto& d : j.at("distances")) {
      require(d.is_number_unsigned() ? d.get<std::uint64_t>() >= 1
                                     : d.is_number_integer() && d.get<std::int64_t>() >= 1,
              "distances must be positive integers");
      s.distances.push_back(d.get<std::size_t>());
    }
  }
  s.pinning_budget = count_field(j, "pinning_budget", s.pinning_budget);

  require(s.trials >= 1, "trials must be >= 1");
  require(s.n >= 1, "n must be >= 1");
  require(s.eps > 0.0 && s.eps <= 1.0, "eps must lie in (0, 1]");
  require(s.delta > 0.0 && s.delta <= 1.0, "delta must lie in (0, 1]");
  require(s.beta >= 0.0 && s.beta <= 1.0, "beta must lie in [0, 1]");
  require(s.slack >= 1.0, "slack must be >= 1");
  require(s.oracle_samples >= 1, "oracle.samples_per_order must be >= 1");
  require(s.oracle_eps > 0.0 && s.oracle_eps < 1.0, "oracle.eps must lie in (0, 1)");
  require(s.estimator_eps > 0.0 && s.estimator_eps <= 1.0, "estimator.eps must lie in (0, 1]");
  require(s.estimator_fail_prob > 0.0 && s.estimator_fail_prob < 1.0,
          "estimator.fail_prob must lie in (0, 1)");
  require(s.estimator_groups >= 1, "estimator.groups must be >= 1");
  require(s.min_success_fraction >= 0.0 && s.min_success_fraction <= 1.0,
          "min_success_fraction must lie in [0, 1]");
  require(s.draws >= 1, "draws must be >= 1");
  require(s.glauber_constant > 0.0, "glauber_constant must be positive");
  require(s.tv_threshold > 0.0, "tv_threshold must be positive");
  require(s.void_sigma > 0.0, "void_sigma must be positive");
  require(s.dkw_alpha > 0.0 && s.dkw_alpha < 1.0, "dkw_alpha must lie in (0, 1)");
  require(s.n_max >= 2 && s.n_max <= 19, "n_max must lie in [2, 19]");
  for (double l : s.lambdas) require(l >= 0.0 && std::isfinite(l), "lambdas must be >= 0");
  for (double b : s.betas) require(b >= 0.0 && b <= 1.0, "betas must lie in [0, 1]");
  require(s.a > 0.0, "a must be positive");
  require(s.k_max >= 1, "k_max must be >= 1");
  require(s.pwcc_samples >= 1, "pwcc_samples must be >= 1");
  require(s.pass_fraction >= 0.0 && s.pass_fraction <= 1.0, "pass_fraction must lie in [0, 1]");
  require(s.ssm_lambda >= 0.0, "ssm_lambda must be >= 0");
  if (s.sub_box && s.instance) {
    require(box_within(s.instance->region(), *s.sub_box), "sub_box must lie inside the region");
  }
  if (s.kind == ExperimentKind::sample_validate && s.sampler == HardcoreSampler::exact) {
    require(s.n <= 26, "the exact sampler needs n <= 26");
  }
  return s;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("spec file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment_spec(j);
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  ExperimentOutput out;
  switch (spec.kind) {
    case ExperimentKind::concentration: out.rows = run_concentration(spec); break;
    case ExperimentKind::approximate_z: out.rows = run_approximate_z(spec); break;
    case ExperimentKind::sample_validate: out.rows = run_sample_validate(spec); break;
    case ExperimentKind::lemma_suite: out.rows = run_lemma_suite(spec); break;
    case ExperimentKind::connective: out.rows = run_connective(spec); break;
    case ExperimentKind::ssm: out.rows = run_ssm(spec); break;
  }
  sort_rows(out.rows);
  out.summary = summarize(spec, out.rows);
  out.passed = out.summary.at("passed").get<bool>();
  return out;
}

Json summarize(const ExperimentSpec& spec, const std::vector<Json>& rows) {
  Json s;
  try {
    switch (spec.kind) {
      case ExperimentKind::concentration: s = summarize_concentration(spec, rows); break;
      case ExperimentKind::approximate_z: s = summarize_approximate_z(spec, rows); break;
      case ExperimentKind::sample_validate: s = summarize_sample_validate(spec, rows); break;
      case ExperimentKind::lemma_suite: s = summarize_lemma_suite(spec, rows); break;
      case ExperimentKind::connective: s = summarize_connective(spec, rows); break;
      case ExperimentKind::ssm: s = summarize_ssm(spec, rows); break;
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed rows: ") + e.what());
  }
  s["kind"] = to_string(spec.kind);
  s["seed"] = spec.seed;
  s["spec"] = spec.resolved();
  return s;
}

void write_experiment_output(const ExperimentSpec& spec, const ExperimentOutput& out,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream rows(dir / "rows.jsonl");
    if (!rows) throw std::runtime_error("cannot write " + (dir / "rows.jsonl").string());
    Json meta = {{"type", "meta"}, {"seed", spec.seed}, {"spec", spec.resolved()}};
    rows << meta.dump() << '\n';
    for (const auto& r : out.rows) rows << r.dump() << '\n';
  }
  std::ofstream summary(dir / "summary.json");
  if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
  summary << out.summary.dump(2) << '\n';
}

std::pair<ExperimentSpec, std::vector<Json>> read_experiment_rows(const std::filesystem::path& dir) {
  const auto path = std::filesystem::is_directory(dir) ? dir / "rows.jsonl" : dir;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  std::optional<ExperimentSpec> spec;
  std::vector<Json> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ConfigError("bad JSONL line in " + path.string() + ": " + e.what());
    }
    if (j.value("type", std::string()) == "meta") {
      Json sj = j.at("spec");
      sj["seed"] = j.at("seed");
      spec = parse_experiment_spec(sj);
    } else {
      rows.push_back(std::move(j));
    }
  }
  if (!spec) throw ConfigError(path.string() + " has no meta line");
  return {std::move(*spec), std::move(rows)};
}

std::pair<double, double> expected_partition_from_oracle(const OracleResult& oracle,
                                                         double lambda_volume, std::size_t n) {
  const double ln = lambda_volume / static_cast<double>(n);
  const std::size_t top = std::min(n, oracle.order_mean.size() - 1);
  double value = 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k <= top; ++k) {
    // C(n, k) lambda_n^k in log space.
    const double log_w = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                         std::lgamma(static_cast<double>(n - k) + 1.0) +
                         (k == 0 ? 0.0 : static_cast<double>(k) * std::log(ln));
    const double w = ln == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::exp(log_w);
    value += w * oracle.order_mean[k];
    var += w * w * oracle.order_se[k] * oracle.order_se[k];
  }
  return {value, std::sqrt(var)};
}

double efron_stein_constant(double lambda_volume, std::size_t n) {
  const double l = lambda_volume / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  return nn * l * l + nn * (nn - 1.0) / 2.0 * l * l * l * l;
}

double chebyshev_failure_bound(double c, double eps) {
  if (!(c < 2.0)) return std::numeric_limits<double>::infinity();
  return (2.0 / (2.0 - c) - 1.0) / (eps * eps);
}

}  // namespace gibbsgraph
