#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "gibbsgraph/io.hpp"

using namespace gibbsgraph;

TEST_SUITE("io") {
  TEST_CASE("regions, boxes and points round-trip") {
    const Region r({1.5, 2.0}, Boundary::periodic);
    CHECK(region_from_json(to_json(r)) == r);
    CHECK(region_from_json(Json::parse(R"({"sides":[3]})")).boundary() == Boundary::open);
    const Box b{Point{0.1, 0.2}, Point{0.5, 0.9}};
    const Box back = box_from_json(to_json(b));
    CHECK(back.lower == b.lower);
    CHECK(back.upper == b.upper);
    CHECK_THROWS_AS(region_from_json(Json::parse(R"({"sides":[1],"boundary":"torus"})")), ConfigError);
    CHECK_THROWS_AS(region_from_json(Json::parse(R"({"sides":[-1]})")), ConfigError);
    CHECK_THROWS_AS(region_from_json(Json::parse(R"({"sides":"1"})")), ConfigError);
    CHECK_THROWS_AS(point_from_json(Json::array()), ConfigError);
    CHECK_THROWS_AS(box_from_json(Json::parse(R"({"lower":[0],"upper":[1,1]})")), ConfigError);
  }

  TEST_CASE("potentials round-trip") {
    for (const auto& p : {PotentialSpec::zero(), PotentialSpec::hard_sphere(0.1),
                          PotentialSpec::gaussian_overlap(1.0, 0.3),
                          PotentialSpec::generalized_exponential(2.0, 0.5, 3.0),
                          PotentialSpec::hard_core_yukawa(0.1, 0.5, 2.0)}) {
      CHECK(potential_from_json(to_json(p)) == p);
    }
    CHECK_THROWS_AS(potential_from_json(Json::parse(R"({"family":"lennard_jones"})")), ConfigError);
    CHECK_THROWS_AS(potential_from_json(Json::parse(R"({"family":"hard_sphere"})")), ConfigError);
    CHECK_THROWS_AS(potential_from_json(Json::parse(R"({"family":"hard_sphere","r":-1})")), ConfigError);
    CHECK_THROWS_AS(potential_from_json(Json::parse(R"({"family":"hard_sphere","r":"big"})")), ConfigError);
  }

  TEST_CASE("instances round-trip") {
    const GPPInstance inst(Region({2.0}), PotentialSpec::hard_sphere(0.1), 1.5);
    const auto back = instance_from_json(to_json(inst));
    CHECK(back.region() == inst.region());
    CHECK(back.potential() == inst.potential());
    CHECK(back.lambda() == 1.5);
    CHECK_THROWS_AS(instance_from_json(Json::parse(
                        R"({"region":{"sides":[1]},"potential":{"family":"zero"},"lambda":-2})")),
                    ConfigError);
  }

  TEST_CASE("graphs round-trip") {
    const Region r({2.0, 2.0});
    const auto g = sample_graph(r, PotentialSpec::gaussian_overlap(1.0, 0.3), 50, std::uint64_t{11});
    const auto j = to_json(g);
    const auto back = graph_from_json(Json::parse(j.dump()));
    CHECK(back == g);
    CHECK(back.meta().seed == 11);
    REQUIRE(back.meta().potential);
    CHECK(*back.meta().potential == PotentialSpec::gaussian_overlap(1.0, 0.3));
    CHECK_FALSE(j.at("meta").contains("timestamp"));
    for (const auto& e : j.at("edges")) CHECK(e[0].get<int>() < e[1].get<int>());

    CHECK(graph_from_json(Json::parse(R"({"n":3,"edges":[]})")) == empty_graph(3));
    CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"n":3,"edges":[[1,0]]})")), ConfigError);
    CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"n":3,"edges":[[0,3]]})")), ConfigError);
    CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"n":3,"edges":[[0,1],[0,1]]})")), ConfigError);
    CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"n":3,"edges":[["a",1]]})")), ConfigError);
    CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"n":3,"edges":5})")), ConfigError);
    CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"n":2,"edges":[],"points":[[0.5]]})")), ConfigError);
    CHECK_THROWS_AS(graph_from_json(Json::parse(
                        R"({"n":1,"edges":[],"points":[[5.0]],"meta":{"region":{"sides":[1]}}})")),
                    ConfigError);
    CHECK_THROWS_AS(graph_from_json(Json::parse("[]")), ConfigError);
  }

  TEST_CASE("invalid JSON text") {
    Json j;
    CHECK_THROWS_AS(j = Json::parse("{\"n\": 3,"), Json::parse_error);
  }

  TEST_CASE("estimates and csv") {
    Estimate e;
    e.value = std::numeric_limits<double>::infinity();
    const auto j = to_json(e);
    CHECK(j.at("value").is_null());
    CHECK(j.at("std_error").is_null());
    CHECK(number_or_null(2.5) == Json(2.5));

    std::ostringstream os;
    WeitzLayerProfile p;
    p.root = 3;
    p.counts = {1, 2, 2};
    write_profiles_csv(os, {p});
    CHECK(os.str() == "root,k,count\n3,0,1\n3,1,2\n3,2,2\n");
    std::ostringstream ds;
    SsmRow row;
    row.distance = 2;
    row.gap = 0.125;
    write_decay_csv(ds, 0, {row});
    CHECK(ds.str() == "root,s,gap\n0,2,0.125\n");
  }
}
