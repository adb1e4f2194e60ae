#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gibbsgraph/experiments.hpp"
#include "gibbsgraph/gpp.hpp"
#include "gibbsgraph/io.hpp"
#include "gibbsgraph/parallel.hpp"

namespace gibbsgraph::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string spec;
  std::string in;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 0;
  bool verbose = false;
};

Json read_json_file(const std::string& path) {
  if (path.empty()) throw ConfigError("--spec is required");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("spec file " + path + " is not valid JSON: " + e.what());
  }
}

bool non_negative_integer(const Json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t resolve_seed(const Options& o, const Json& spec) {
  if (o.seed) return *o.seed;
  if (!spec.contains("seed")) return 0;
  if (!non_negative_integer(spec.at("seed"))) throw ConfigError("seed must be a non-negative integer");
  return spec.at("seed").get<std::uint64_t>();
}

std::size_t positive_count(const Json& spec, const char* key, std::size_t def) {
  if (!spec.contains(key)) return def;
  const auto& v = spec.at(key);
  if (!non_negative_integer(v) || v.get<std::size_t>() == 0) {
    throw ConfigError(std::string("field '") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

double real(const Json& spec, const char* key, double def) {
  if (!spec.contains(key)) return def;
  if (!spec.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return spec.at(key).get<double>();
}

SizeMode size_mode(const Json& spec) {
  const std::string m = spec.value("size_mode", std::string("practical"));
  if (m == "practical") return SizeMode::practical;
  if (m == "theoretical") return SizeMode::theoretical;
  throw ConfigError("size_mode must be \"theoretical\" or \"practical\"");
}

// Writes `text` to out/name when --out is given, to the output stream otherwise.
void emit(const Options& o, const std::string& name, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  fs::create_directories(o.out);
  std::ofstream f(fs::path(o.out) / name);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(o.out) / name).string());
  f << text;
}

int cmd_graph(const Options& o, std::ostream& out) {
  const Json spec = read_json_file(o.spec);
  const std::uint64_t seed = resolve_seed(o, spec);
  if (!spec.contains("region") || !spec.contains("potential")) {
    throw ConfigError("graph spec needs 'region' and 'potential'");
  }
  const Region region = region_from_json(spec.at("region"));
  const PotentialSpec potential = potential_from_json(spec.at("potential"));
  const std::size_t n = positive_count(spec, "n", 0);
  if (n == 0) throw ConfigError("graph spec needs a positive 'n'");
  const LabeledGraph g = sample_graph(region, potential, n, seed);
  Json j = to_json(g);
  j["meta"]["spec"] = {{"region", to_json(region)}, {"potential", to_json(potential)}, {"n", n}, {"seed", seed}};
  emit(o, "graph.json", j.dump() + "\n", out);
  return kOk;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  const Json spec = read_json_file(o.spec);
  const std::uint64_t seed = resolve_seed(o, spec);
  if (!spec.contains("instance")) throw ConfigError("estimate spec needs an 'instance'");
  const GPPInstance inst = instance_from_json(spec.at("instance"));
  const std::string method = spec.value("method", std::string("approximate"));
  const double eps = real(spec, "eps", 0.1);
  Rng rng = make_stream(seed, 0);
  Json result;
  Json resolved = {{"instance", to_json(inst)}, {"method", method}, {"eps", eps}, {"seed", seed}};
  if (method == "approximate") {
    const SizeMode mode = size_mode(spec);
    const std::size_t n = positive_count(spec, "n", 1000);
    EstimatorOptions est;
    est.groups = positive_count(spec, "groups", est.groups);
    resolved["size_mode"] = mode == SizeMode::theoretical ? "theoretical" : "practical";
    resolved["n"] = n;
    resolved["groups"] = est.groups;
    const auto r = approximate_partition(inst, eps, rng, mode, n, est);
    result["estimate"] = to_json(r.estimate);
    result["n"] = r.n;
    result["theoretical_n"] = number_or_null(r.theoretical_n);
    result["practical"] = r.practical;
    result["max_degree"] = r.max_degree;
  } else if (method == "oracle") {
    OracleOptions opt;
    opt.eps = eps;
    opt.samples_per_order = positive_count(spec, "samples_per_order", opt.samples_per_order);
    if (spec.contains("truncation")) opt.truncation = positive_count(spec, "truncation", 1);
    resolved["samples_per_order"] = opt.samples_per_order;
    resolved["truncation"] = opt.truncation ? Json(*opt.truncation) : Json(nullptr);
    const auto r = oracle_partition(inst, opt, rng);
    result["estimate"] = to_json(r.estimate);
    result["truncation"] = r.truncation;
    result["tail_bound"] = r.tail_bound;
  } else {
    throw ConfigError("method must be \"approximate\" or \"oracle\"");
  }
  result["spec"] = resolved;
  result["seed"] = seed;
  emit(o, "estimate.json", result.dump(2) + "\n", out);
  return kOk;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const Json spec = read_json_file(o.spec);
  const std::uint64_t seed = resolve_seed(o, spec);
  if (!spec.contains("instance")) throw ConfigError("sample spec needs an 'instance'");
  const GPPInstance inst = instance_from_json(spec.at("instance"));
  const double eps = real(spec, "eps", 0.1);
  const SizeMode mode = size_mode(spec);
  const std::size_t n = positive_count(spec, "n", 1000);
  const std::size_t count = positive_count(spec, "count", 1);
  const double constant = real(spec, "glauber_constant", 20.0);
  const std::string sampler_name = spec.value("sampler", std::string("glauber"));
  if (sampler_name != "glauber" && sampler_name != "exact") {
    throw ConfigError("sampler must be \"glauber\" or \"exact\"");
  }
  const auto sampler = sampler_name == "exact" ? HardcoreSampler::exact : HardcoreSampler::glauber;
  Json resolved = {{"instance", to_json(inst)}, {"eps", eps}, {"n", n},
                   {"size_mode", mode == SizeMode::theoretical ? "theoretical" : "practical"},
                   {"count", count}, {"sampler", sampler_name}, {"glauber_constant", constant},
                   {"seed", seed}};

  std::vector<std::string> lines(count);
  parallel_for(count, [&](std::size_t i) {
    Rng rng = make_stream(seed, i);
    const auto r = sample_configuration(inst, eps, rng, mode, n, sampler, constant);
    Json row = {{"replicate", i}, {"points", to_json(r.configuration)},
                {"count", r.configuration.size()}, {"degree_failure", r.degree_failure}};
    lines[i] = row.dump();
  });
  std::string text = Json{{"type", "meta"}, {"spec", resolved}, {"seed", seed}}.dump() + "\n";
  for (const auto& l : lines) text += l + "\n";
  emit(o, "samples.jsonl", text, out);
  return kOk;
}

void write_decay_tables(const ExperimentSpec& spec, const ExperimentOutput& result,
                        const fs::path& dir) {
  for (std::size_t gi = 0; gi < spec.paths.size(); ++gi) {
    std::vector<SsmRow> table;
    for (const auto& r : result.rows) {
      if (r.at("graph").get<std::size_t>() != gi) continue;
      SsmRow row;
      row.distance = r.at("distance").get<std::size_t>();
      row.gap = r.at("gap").get<double>();
      table.push_back(row);
    }
    std::ofstream f(dir / ("decay_" + std::to_string(gi) + ".csv"));
    write_decay_csv(f, spec.paths[gi].root, table);
  }
}

int cmd_experiment(const Options& o, std::ostream& out, std::ostream& err) {
  Json j = read_json_file(o.spec);
  if (o.seed) j["seed"] = *o.seed;
  const ExperimentSpec spec = parse_experiment_spec(j);
  const auto start = std::chrono::steady_clock::now();
  const ExperimentOutput result = run_experiment(spec);
  if (o.verbose) {
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << to_string(spec.kind) << ": " << result.rows.size() << " rows in " << s << " s\n";
  }
  const fs::path dir = o.out.empty() ? fs::path("gibbsgraph-out") : fs::path(o.out);
  write_experiment_output(spec, result, dir);
  if (spec.kind == ExperimentKind::ssm) write_decay_tables(spec, result, dir);
  out << result.summary.dump(2) << '\n';
  return result.passed ? kOk : kAssertionFailed;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const std::string in = o.in.empty() ? o.spec : o.in;
  if (in.empty()) throw ConfigError("analyze needs --in <run directory or rows.jsonl>");
  const auto [spec, rows] = read_experiment_rows(in);
  const Json summary = summarize(spec, rows);
  if (!o.out.empty()) emit(o, "summary.json", summary.dump(2) + "\n", out);
  out << summary.dump(2) << '\n';
  return summary.at("passed").get<bool>() ? kOk : kAssertionFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gibbs point processes via hard-core models on random graphs"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--spec", o.spec, "Spec file (JSON)");
  app.add_option("--seed", o.seed, "Master seed; overrides the spec");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--threads", o.threads, "Worker threads (default: GIBBSGRAPH_THREADS or all cores)");
  app.add_flag("-v,--verbose", o.verbose, "Progress on stderr");

  auto* graph = app.add_subcommand("graph", "Sample a labeled graph from D(n, V, phi)");
  auto* estimate = app.add_subcommand("estimate", "Approximate or oracle partition function");
  auto* sample = app.add_subcommand("sample", "Approximate samples of the point process (JSONL)");
  auto* experiment = app.add_subcommand("experiment", "Run an experiment spec");
  auto* analyze = app.add_subcommand("analyze", "Recompute a summary from rows.jsonl");
  analyze->add_option("--in", o.in, "Run directory or rows.jsonl");
  for (auto* sub : {graph, estimate, sample, experiment, analyze}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (o.threads > 0) set_thread_count(o.threads);
    if (*graph) return cmd_graph(o, out);
    if (*estimate) return cmd_estimate(o, out);
    if (*sample) return cmd_sample(o, out);
    if (*experiment) return cmd_experiment(o, out, err);
    if (*analyze) return cmd_analyze(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SizeLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kAssertionFailed;
  }
  return kUsageError;
}

}  // namespace gibbsgraph::cli
