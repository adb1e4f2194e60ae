#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gibbsgraph/gpp.hpp"
#include "gibbsgraph/graph.hpp"
#include "gibbsgraph/io.hpp"
#include "gibbsgraph/rng.hpp"

namespace gibbsgraph {

enum class ExperimentKind { concentration, approximate_z, sample_validate, lemma_suite, connective, ssm };

std::string to_string(ExperimentKind k);
/// Throws ConfigError for unknown names.
ExperimentKind experiment_kind_from_string(const std::string& s);

struct PathSpec {
  std::size_t n = 0;
  Vertex root = 0;
};

/// Parsed experiment file. Every field has a default; the JSON names are
/// listed in README.md and exercised by configs/*.json.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::concentration;
  std::uint64_t seed = 0;
  std::optional<GPPInstance> instance;

  std::size_t n = 100;
  std::size_t trials = 100;
  double eps = 0.2;
  double delta = 0.1;
  double beta = 0.0;
  SizeMode size_mode = SizeMode::practical;
  double slack = 2.0;

  // oracle_partition settings
  std::size_t oracle_samples = 100000;
  std::optional<std::size_t> oracle_truncation;
  double oracle_eps = 0.01;

  // concentration
  bool oracle_check = false;
  double estimator_eps = 0.05;
  double estimator_fail_prob = 0.1;

  // approximate_z
  double min_success_fraction = 0.7;
  std::size_t estimator_groups = 12;

  // sample_validate
  std::size_t draws = 100000;
  HardcoreSampler sampler = HardcoreSampler::glauber;
  double glauber_constant = 20.0;
  std::optional<Box> sub_box;
  double tv_threshold = 0.05;
  double void_sigma = 3.0;
  double dkw_alpha = 1e-3;

  // lemma_suite
  std::size_t graphs = 200;
  std::size_t n_max = 10;
  std::vector<double> lambdas{0.1, 0.5, 1.0};
  std::vector<double> betas{0.0, 0.5, 1.0};

  // connective
  std::size_t calibration_graphs = 20;
  std::size_t test_graphs = 50;
  double growth_eps = 0.2;
  double a = 4.0;
  std::size_t k_max = 4;
  std::size_t pwcc_samples = 1000000;
  double pass_fraction = 0.95;
  std::uint64_t node_budget = 10'000'000;

  // ssm
  std::vector<PathSpec> paths{{20, 0}};
  double ssm_lambda = 0.5;
  std::vector<std::size_t> distances{1, 2, 3, 4, 5, 6};
  std::size_t pinning_budget = 4096;

  /// Every setting, defaults included, as written to output files.
  Json resolved() const;
};

/// Throws ConfigError on unknown kinds, missing instances, or invalid values.
ExperimentSpec parse_experiment_spec(const Json& j);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct ExperimentOutput {
  std::vector<Json> rows;  // sorted by replicate id
  Json summary;
  bool passed = true;
};

/// Per-replicate streams: replicate i of any experiment draws from
/// make_stream(seed, i). Auxiliary computations (oracles, pwcc) use the
/// reserved indices below, so rerunning a subset of replicates is possible.
inline constexpr std::uint64_t kOracleStream = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kVoidOracleStream = kOracleStream + 1;
inline constexpr std::uint64_t kPwccStream = kOracleStream + 2;

ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Recomputes the summary from the rows alone (plus the spec's thresholds).
Json summarize(const ExperimentSpec& spec, const std::vector<Json>& rows);

/// Writes rows.jsonl (first line: {"type":"meta", spec, seed}) and
/// summary.json into `dir`, creating it if needed.
void write_experiment_output(const ExperimentSpec& spec, const ExperimentOutput& out,
                             const std::filesystem::path& dir);

/// Reads rows.jsonl; returns the spec stored in the meta line and the rows.
std::pair<ExperimentSpec, std::vector<Json>> read_experiment_rows(const std::filesystem::path& dir);

/// Remove-edge, add-vertex, monotonicity and binomial-domination checks on one
/// small graph (n <= 19), in exact dyadic arithmetic. Random choices (which
/// vertex sets to attach or delete) come from `rng`.
struct LemmaTally {
  std::size_t checks = 0;
  std::size_t violations = 0;
};
struct LemmaReport {
  LemmaTally remove_edge;
  LemmaTally add_vertex;
  LemmaTally hardcore_bounds;
  LemmaTally domination;
};
LemmaReport check_lemmas(const LabeledGraph& g, const std::vector<double>& lambdas,
                         const std::vector<double>& betas, Rng& rng);

/// Random corpus graph for the lemma suite: Erdos-Renyi for even index,
/// hard-sphere geometric for odd index, with 2 <= n <= n_max.
LabeledGraph lemma_corpus_graph(std::size_t index, std::size_t n_max, Rng& rng);

/// E[Z_G(lambda nu / n)] = sum_k C(n, k) (lambda nu / n)^k a_k from per-order
/// oracle means a_k; returns {value, std_error}.
std::pair<double, double> expected_partition_from_oracle(const OracleResult& oracle,
                                                         double lambda_volume, std::size_t n);

/// The Efron-Stein constant n l^2 + C(n, 2) l^4 with l = lambda nu / n.
double efron_stein_constant(double lambda_volume, std::size_t n);

/// (2 / (2 - C) - 1) / eps^2; +inf when C >= 2.
double chebyshev_failure_bound(double c, double eps);

}  // namespace gibbsgraph
