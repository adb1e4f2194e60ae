#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gibbsgraph/experiments.hpp"
#include "gibbsgraph/gpp.hpp"
#include "gibbsgraph/hardcore.hpp"
#include "gibbsgraph/io.hpp"
#include "gibbsgraph/parallel.hpp"
#include "gibbsgraph/weitz.hpp"

namespace py = pybind11;
using namespace gibbsgraph;

namespace {

// Python values cross the boundary in the same JSON shapes as the files.
Json to_cpp(const py::handle& obj) {
  py::object dumps = py::module_::import("json").attr("dumps");
  return Json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const Json& j) {
  py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

LabeledGraph graph_arg(const py::dict& g) { return graph_from_json(to_cpp(g)); }

NeighborhoodOrdering ordering_arg(const LabeledGraph& g, const std::string& name) {
  if (name == "distance") return distance_ordering(g);
  if (name == "id") return id_ordering(g);
  throw std::invalid_argument("ordering must be \"distance\" or \"id\"");
}

py::dict profile_py(const WeitzLayerProfile& p) {
  py::dict d;
  d["root"] = p.root;
  d["counts"] = p.counts;
  d["truncated"] = p.truncated;
  d["nodes"] = p.nodes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Repulsive Gibbs point processes through hard-core models on random graphs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SizeLimitError>(m, "SizeLimitError", PyExc_ValueError);

  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
  m.def("thread_count", &thread_count);

  m.def(
      "temperedness_constant",
      [](const py::dict& potential, int d) {
        return temperedness_constant(potential_from_json(to_cpp(potential)), d);
      },
      py::arg("potential"), py::arg("d"));

  m.def(
      "sample_graph",
      [](const py::dict& region, const py::dict& potential, std::size_t n, std::uint64_t seed) {
        const Region r = region_from_json(to_cpp(region));
        const PotentialSpec p = potential_from_json(to_cpp(potential));
        LabeledGraph g;
        {
          py::gil_scoped_release release;
          g = sample_graph(r, p, n, seed);
        }
        return to_py(to_json(g));
      },
      py::arg("region"), py::arg("potential"), py::arg("n"), py::arg("seed"));

  m.def("max_degree", [](const py::dict& g) { return max_degree(graph_arg(g)); }, py::arg("graph"));

  m.def(
      "partition_exact",
      [](const py::dict& g, double lambda, double beta) {
        return partition_exact(graph_arg(g), SpinSystemParams{lambda, beta});
      },
      py::arg("graph"), py::arg("lam"), py::arg("beta") = 0.0);

  m.def(
      "log_partition_frontier",
      [](const py::dict& g, double lambda, double beta) {
        const LabeledGraph graph = graph_arg(g);
        return log_partition_frontier(graph, SpinSystemParams{lambda, beta}, coordinate_order(graph));
      },
      py::arg("graph"), py::arg("lam"), py::arg("beta") = 0.0);

  m.def(
      "estimate_partition",
      [](const py::dict& g, double lambda, double eps, double fail_prob, std::uint64_t seed,
         std::size_t groups) {
        const LabeledGraph graph = graph_arg(g);
        EstimatorOptions opt;
        opt.groups = groups;
        Estimate e;
        {
          py::gil_scoped_release release;
          Rng rng = make_stream(seed, 0);
          e = estimate_partition(graph, lambda, eps, fail_prob, rng, opt);
        }
        return to_py(to_json(e));
      },
      py::arg("graph"), py::arg("lam"), py::arg("eps"), py::arg("fail_prob"), py::arg("seed"),
      py::arg("groups") = 12);

  m.def("critical_fugacity", &critical_fugacity, py::arg("max_degree"));

  m.def(
      "glauber_sample",
      [](const py::dict& g, double lambda, std::uint64_t steps, std::uint64_t seed) {
        const LabeledGraph graph = graph_arg(g);
        Rng rng = make_stream(seed, 0);
        return glauber_sample(graph, lambda, steps, rng);
      },
      py::arg("graph"), py::arg("lam"), py::arg("steps"), py::arg("seed"));

  m.def(
      "exact_sample",
      [](const py::dict& g, double lambda, std::uint64_t seed) {
        Rng rng = make_stream(seed, 0);
        return exact_sample(graph_arg(g), lambda, rng);
      },
      py::arg("graph"), py::arg("lam"), py::arg("seed"));

  m.def(
      "occupation_ratio",
      [](const py::dict& g, double lambda, Vertex v, const std::map<Vertex, int>& pinning) {
        Pinning pin;
        for (const auto& [u, s] : pinning) pin.emplace_back(u, static_cast<std::uint8_t>(s != 0));
        return occupation_ratio_exact(graph_arg(g), lambda, v, pin);
      },
      py::arg("graph"), py::arg("lam"), py::arg("v"), py::arg("pinning") = std::map<Vertex, int>{});

  m.def(
      "oracle_partition",
      [](const py::dict& instance, std::uint64_t seed, double eps, std::size_t samples_per_order,
         std::optional<std::size_t> truncation) {
        const GPPInstance inst = instance_from_json(to_cpp(instance));
        OracleOptions opt;
        opt.eps = eps;
        opt.samples_per_order = samples_per_order;
        opt.truncation = truncation;
        OracleResult r;
        {
          py::gil_scoped_release release;
          Rng rng = make_stream(seed, 0);
          r = oracle_partition(inst, opt, rng);
        }
        Json j = to_json(r.estimate);
        j["truncation"] = r.truncation;
        j["tail_bound"] = r.tail_bound;
        j["order_mean"] = r.order_mean;
        j["terms"] = r.terms;
        return to_py(j);
      },
      py::arg("instance"), py::arg("seed"), py::arg("eps") = 0.01,
      py::arg("samples_per_order") = 100000, py::arg("truncation") = std::nullopt);

  m.def(
      "approximate_partition",
      [](const py::dict& instance, double eps, std::uint64_t seed, std::optional<std::size_t> n,
         std::size_t groups) {
        const GPPInstance inst = instance_from_json(to_cpp(instance));
        EstimatorOptions opt;
        opt.groups = groups;
        ApproximationResult r;
        {
          py::gil_scoped_release release;
          Rng rng = make_stream(seed, 0);
          r = approximate_partition(inst, eps, rng, n ? SizeMode::practical : SizeMode::theoretical,
                                    n.value_or(0), opt);
        }
        Json j = to_json(r.estimate);
        j["n"] = r.n;
        j["theoretical_n"] = number_or_null(r.theoretical_n);
        j["max_degree"] = r.max_degree;
        return to_py(j);
      },
      py::arg("instance"), py::arg("eps"), py::arg("seed"), py::arg("n") = std::nullopt,
      py::arg("groups") = 12);

  m.def(
      "sample_configuration",
      [](const py::dict& instance, double eps, std::uint64_t seed, std::optional<std::size_t> n,
         const std::string& sampler) {
        const GPPInstance inst = instance_from_json(to_cpp(instance));
        if (sampler != "glauber" && sampler != "exact") {
          throw std::invalid_argument("sampler must be \"glauber\" or \"exact\"");
        }
        SampleResult r;
        {
          py::gil_scoped_release release;
          Rng rng = make_stream(seed, 0);
          r = sample_configuration(inst, eps, rng, n ? SizeMode::practical : SizeMode::theoretical,
                                   n.value_or(0),
                                   sampler == "exact" ? HardcoreSampler::exact : HardcoreSampler::glauber);
        }
        Json j;
        j["points"] = to_json(r.configuration);
        j["degree_failure"] = r.degree_failure;
        j["n"] = r.n;
        return to_py(j);
      },
      py::arg("instance"), py::arg("eps"), py::arg("seed"), py::arg("n") = std::nullopt,
      py::arg("sampler") = "glauber");

  m.def(
      "weitz_layer_counts",
      [](const py::dict& g, Vertex root, std::size_t max_depth, const std::string& ordering) {
        const LabeledGraph graph = graph_arg(g);
        return profile_py(weitz_layer_counts(graph, root, ordering_arg(graph, ordering), max_depth));
      },
      py::arg("graph"), py::arg("root"), py::arg("max_depth"), py::arg("ordering") = "distance");

  m.def(
      "saw_layer_counts",
      [](const py::dict& g, Vertex root, std::size_t max_depth) {
        return profile_py(saw_layer_counts(graph_arg(g), root, max_depth));
      },
      py::arg("graph"), py::arg("root"), py::arg("max_depth"));

  m.def(
      "pwcc_estimate",
      [](const py::dict& potential, int d, std::size_t k_max, std::size_t samples, std::uint64_t seed) {
        const PotentialSpec p = potential_from_json(to_cpp(potential));
        PwccResult r;
        {
          py::gil_scoped_release release;
          Rng rng = make_stream(seed, 0);
          r = pwcc_estimate(p, d, k_max, samples, rng);
        }
        Json j = to_json(r.estimate);
        j["best_k"] = r.best_k;
        j["roots"] = r.roots;
        return to_py(j);
      },
      py::arg("potential"), py::arg("d"), py::arg("k_max"), py::arg("samples"), py::arg("seed"));

  m.def(
      "ssm_decay_table",
      [](const py::dict& g, double lambda, Vertex root, const std::vector<std::size_t>& distances,
         std::uint64_t seed, std::size_t budget) {
        Rng rng = make_stream(seed, 0);
        py::list out;
        for (const auto& r : ssm_decay_table(graph_arg(g), lambda, root, distances, rng, budget)) {
          py::dict d;
          d["distance"] = r.distance;
          d["gap"] = r.gap;
          d["sphere_size"] = r.sphere_size;
          d["pinnings"] = r.pinnings;
          d["sampled"] = r.sampled;
          out.append(d);
        }
        return out;
      },
      py::arg("graph"), py::arg("lam"), py::arg("root"), py::arg("distances"), py::arg("seed"),
      py::arg("budget") = 4096);

  m.def(
      "run_experiment",
      [](const py::dict& spec) {
        const ExperimentSpec s = parse_experiment_spec(to_cpp(spec));
        ExperimentOutput out;
        {
          py::gil_scoped_release release;
          out = run_experiment(s);
        }
        Json j;
        j["rows"] = out.rows;
        j["summary"] = out.summary;
        j["passed"] = out.passed;
        return to_py(j);
      },
      py::arg("spec"));

  m.def(
      "summarize",
      [](const py::dict& spec, const py::list& rows) {
        const ExperimentSpec s = parse_experiment_spec(to_cpp(spec));
        std::vector<Json> r;
        for (const auto& row : rows) r.push_back(to_cpp(row));
        return to_py(summarize(s, r));
      },
      py::arg("spec"), py::arg("rows"));
}
