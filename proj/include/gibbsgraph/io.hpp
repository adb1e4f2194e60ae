#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbsgraph/estimate.hpp"
#include "gibbsgraph/geometry.hpp"
#include "gibbsgraph/gpp.hpp"
#include "gibbsgraph/graph.hpp"
#include "gibbsgraph/potential.hpp"
#include "gibbsgraph/weitz.hpp"

namespace gibbsgraph {

using Json = nlohmann::json;

/// Malformed or invalid configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const Point& p);
Point point_from_json(const Json& j);

/// {"sides": [...], "boundary": "open" | "periodic"}
Json to_json(const Region& r);
Region region_from_json(const Json& j);

/// {"lower": [...], "upper": [...]}
Json to_json(const Box& b);
Box box_from_json(const Json& j);

/// {"family": "hard_sphere", "r": 0.5} and so on.
Json to_json(const PotentialSpec& p);
PotentialSpec potential_from_json(const Json& j);

/// {"region": ..., "potential": ..., "lambda": ...}
Json to_json(const GPPInstance& inst);
GPPInstance instance_from_json(const Json& j);

/// {"n", "points", "edges" (i < j), "meta"}.
Json to_json(const LabeledGraph& g);
/// Validates every invariant; throws ConfigError on violations.
LabeledGraph graph_from_json(const Json& j);

/// Non-finite values become null.
Json to_json(const Estimate& e);
Json number_or_null(double x);

Json to_json(const PointConfiguration& c);

/// CSV lines "root,k,count" for each profile.
void write_profiles_csv(std::ostream& os, const std::vector<WeitzLayerProfile>& profiles);
/// CSV lines "root,s,gap".
void write_decay_csv(std::ostream& os, Vertex root, const std::vector<SsmRow>& rows);

}  // namespace gibbsgraph
