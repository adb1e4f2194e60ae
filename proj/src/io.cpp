#include "gibbsgraph/io.hpp"

#include <cmath>
#include <iomanip>

namespace gibbsgraph {
namespace {

template <class T>
T get_required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing required field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type: " + e.what());
  }
}

std::vector<double> number_array(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

template <class F>
auto rethrow_as_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const Point& p) {
  Json a = Json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

Point point_from_json(const Json& j) {
  const auto v = number_array(j, "point");
  if (v.empty()) throw ConfigError("point must have at least one coordinate");
  return Point(std::span<const double>(v));
}

Json to_json(const Region& r) {
  return {{"sides", r.sides()}, {"boundary", r.periodic() ? "periodic" : "open"}};
}

Region region_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("region must be an object");
  auto sides = number_array(get_required<Json>(j, "sides"), "region.sides");
  const std::string b = j.value("boundary", std::string("open"));
  Boundary boundary;
  if (b == "open") {
    boundary = Boundary::open;
  } else if (b == "periodic") {
    boundary = Boundary::periodic;
  } else {
    throw ConfigError("region.boundary must be \"open\" or \"periodic\", got \"" + b + "\"");
  }
  return rethrow_as_config([&] { return Region(std::move(sides), boundary); });
}

Json to_json(const Box& b) { return {{"lower", to_json(b.lower)}, {"upper", to_json(b.upper)}}; }

Box box_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("box must be an object");
  Box b{point_from_json(get_required<Json>(j, "lower")),
        point_from_json(get_required<Json>(j, "upper"))};
  if (b.lower.dim() != b.upper.dim()) throw ConfigError("box corners differ in dimension");
  return b;
}

Json to_json(const PotentialSpec& p) {
  Json j;
  j["family"] = p.family();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HardSphere>) {
          j["r"] = v.r;
        } else if constexpr (std::is_same_v<T, GaussianOverlap>) {
          j["eps"] = v.eps;
          j["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<T, GeneralizedExponential>) {
          j["eps"] = v.eps;
          j["sigma"] = v.sigma;
          j["p"] = v.p;
        } else if constexpr (std::is_same_v<T, HardCoreYukawa>) {
          j["hard_radius"] = v.hard_radius;
          j["eps"] = v.eps;
          j["kappa"] = v.kappa;
        }
      },
      p.variant());
  return j;
}

PotentialSpec potential_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("potential must be an object");
  const auto family = get_required<std::string>(j, "family");
  return rethrow_as_config([&]() -> PotentialSpec {
    if (family == "zero") return PotentialSpec::zero();
    if (family == "hard_sphere") return PotentialSpec::hard_sphere(get_required<double>(j, "r"));
    if (family == "gaussian_overlap") {
      return PotentialSpec::gaussian_overlap(get_required<double>(j, "eps"),
                                             get_required<double>(j, "sigma"));
    }
    if (family == "generalized_exponential") {
      return PotentialSpec::generalized_exponential(get_required<double>(j, "eps"),
                                                    get_required<double>(j, "sigma"),
                                                    get_required<double>(j, "p"));
    }
    if (family == "hard_core_yukawa") {
      return PotentialSpec::hard_core_yukawa(j.value("hard_radius", 0.0),
                                             get_required<double>(j, "eps"),
                                             get_required<double>(j, "kappa"));
    }
    throw ConfigError("unknown potential family \"" + family + "\"");
  });
}

Json to_json(const GPPInstance& inst) {
  return {{"region", to_json(inst.region())},
          {"potential", to_json(inst.potential())},
          {"lambda", inst.lambda()}};
}

GPPInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("instance must be an object");
  auto region = region_from_json(get_required<Json>(j, "region"));
  auto potential = potential_from_json(get_required<Json>(j, "potential"));
  const double lambda = get_required<double>(j, "lambda");
  return rethrow_as_config([&] { return GPPInstance(region, potential, lambda); });
}

Json to_json(const LabeledGraph& g) {
  Json j;
  j["n"] = g.size();
  Json pts = Json::array();
  for (const auto& p : g.points()) pts.push_back(to_json(p));
  j["points"] = pts;
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  j["edges"] = edges;
  Json meta;
  meta["seed"] = g.meta().seed;
  meta["potential"] = g.meta().potential ? to_json(*g.meta().potential) : Json(nullptr);
  meta["region"] = g.meta().region ? to_json(*g.meta().region) : Json(nullptr);
  if (!g.meta().timestamp.empty()) meta["timestamp"] = g.meta().timestamp;
  j["meta"] = meta;
  return j;
}

LabeledGraph graph_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("graph must be an object");
  const auto n = get_required<std::size_t>(j, "n");
  std::vector<Point> pts;
  if (j.contains("points")) {
    if (!j.at("points").is_array()) throw ConfigError("points must be an array");
    for (const auto& p : j.at("points")) pts.push_back(point_from_json(p));
  }
  const Json edge_list = get_required<Json>(j, "edges");
  if (!edge_list.is_array()) throw ConfigError("edges must be an array");
  std::vector<Edge> edges;
  for (const auto& e : edge_list) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
      throw ConfigError("each edge must be a pair of vertex ids");
    }
    const auto u = e[0].get<Vertex>();
    const auto v = e[1].get<Vertex>();
    if (!(u < v)) throw ConfigError("edges must be listed as [i, j] with i < j");
    edges.emplace_back(u, v);
  }
  GraphMeta meta;
  if (j.contains("meta") && j.at("meta").is_object()) {
    const auto& m = j.at("meta");
    meta.seed = m.value("seed", std::uint64_t{0});
    if (m.contains("potential") && !m.at("potential").is_null()) {
      meta.potential = potential_from_json(m.at("potential"));
    }
    if (m.contains("region") && !m.at("region").is_null()) {
      meta.region = region_from_json(m.at("region"));
    }
    meta.timestamp = m.value("timestamp", std::string());
  }
  if (meta.region) {
    for (const auto& p : pts) {
      if (p.dim() != meta.region->dim() || !meta.region->contains(p)) {
        throw ConfigError("graph point lies outside its region");
      }
    }
  }
  return rethrow_as_config(
      [&] { return LabeledGraph::from_edges(n, edges, std::move(pts), std::move(meta)); });
}

Json to_json(const Estimate& e) {
  Json j;
  j["value"] = number_or_null(e.value);
  j["std_error"] = number_or_null(e.std_error);
  j["rel_error_target"] = e.rel_error_target;
  j["confidence"] = e.confidence;
  j["replicates"] = e.replicates;
  j["valid"] = e.valid;
  if (!e.reason.empty()) j["reason"] = e.reason;
  return j;
}

Json to_json(const PointConfiguration& c) {
  Json a = Json::array();
  for (const auto& p : c) a.push_back(to_json(p));
  return a;
}

void write_profiles_csv(std::ostream& os, const std::vector<WeitzLayerProfile>& profiles) {
  os << "root,k,count\n";
  for (const auto& p : profiles) {
    for (std::size_t k = 0; k < p.counts.size(); ++k) {
      os << p.root << ',' << k << ',' << p.counts[k] << '\n';
    }
  }
}

void write_decay_csv(std::ostream& os, Vertex root, const std::vector<SsmRow>& rows) {
  os << "root,s,gap\n" << std::setprecision(17);
  for (const auto& r : rows) os << root << ',' << r.distance << ',' << r.gap << '\n';
}

}  // namespace gibbsgraph
