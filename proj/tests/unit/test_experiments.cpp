#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gibbsgraph/experiments.hpp"
#include "gibbsgraph/hardcore.hpp"

using namespace gibbsgraph;

namespace {

Json base(const char* kind) {
  return {{"kind", kind},
          {"seed", 5},
          {"instance",
           {{"region", {{"sides", {2.0}}}}, {"potential", {{"family", "hard_sphere"}, {"r", 0.1}}}, {"lambda", 1.0}}}};
}

std::vector<Json> strip_timing(std::vector<Json> rows) {
  for (auto& r : rows) r.erase("wall_ms");
  return rows;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("spec parsing") {
    CHECK(experiment_kind_from_string("ssm") == ExperimentKind::ssm);
    CHECK_THROWS_AS(experiment_kind_from_string("magic"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(Json{{"kind", "magic"}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(Json{{"seed", 1}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(Json{{"kind", "concentration"}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(Json{{"kind", "ssm"}, {"typo_field", 1}}), ConfigError);
    CHECK_NOTHROW(parse_experiment_spec(Json{{"kind", "ssm"}, {"comment", "illustrative"}}));

    auto j = base("concentration");
    j["eps"] = 0.0;
    CHECK_THROWS_AS(parse_experiment_spec(j), ConfigError);
    j = base("concentration");
    j["size_mode"] = 3;
    CHECK_THROWS_AS(parse_experiment_spec(j), ConfigError);
    j = base("concentration");
    j["trials"] = -4;
    CHECK_THROWS_AS(parse_experiment_spec(j), ConfigError);
    j = base("sample_validate");
    j["sub_box"] = {{"lower", {1.5}}, {"upper", {2.5}}};
    CHECK_THROWS_AS(parse_experiment_spec(j), ConfigError);
    j = base("sample_validate");
    j["sampler"] = "exact";
    j["n"] = 40;
    CHECK_THROWS_AS(parse_experiment_spec(j), ConfigError);
    CHECK_THROWS_AS(parse_experiment_spec(Json{{"kind", "ssm"}, {"paths", {{{"n", 5}, {"root", 7}}}}}),
                    ConfigError);

    // The resolved form is itself a valid spec and resolves to itself.
    const auto s = parse_experiment_spec(base("approximate_z"));
    CHECK(parse_experiment_spec(s.resolved()).resolved() == s.resolved());
  }

  TEST_CASE("efron-stein helpers") {
    CHECK(efron_stein_constant(1.0, 4) == doctest::Approx(4 * 0.0625 + 6 * std::pow(0.25, 4)));
    const double c = 0.5;
    CHECK(chebyshev_failure_bound(c, 0.5) == doctest::Approx((2 / 1.5 - 1) / 0.25));
    CHECK(std::isinf(chebyshev_failure_bound(2.0, 0.1)));
  }

  TEST_CASE("expected partition from per-order means") {
    OracleResult o;
    o.order_mean = {1, 1, 1, 1, 1};
    o.order_se = {0, 0, 0, 0, 0};
    const auto [v, se] = expected_partition_from_oracle(o, 2.0, 4);
    CHECK(v == doctest::Approx(std::pow(1.5, 4)));
    CHECK(se == 0.0);
  }

  TEST_CASE("lemma checks on small graphs") {
    Rng rng(1);
    const std::vector<double> lambdas{0.1, 0.5, 1.0};
    const std::vector<double> betas{0.0, 0.5, 1.0};
    const auto k2 = check_lemmas(complete_graph(2), lambdas, betas, rng);
    CHECK(k2.remove_edge.checks == 9);
    CHECK(k2.remove_edge.violations == 0);
    CHECK(k2.add_vertex.violations == 0);
    CHECK(k2.hardcore_bounds.violations == 0);
    CHECK(k2.domination.violations == 0);
    // For an edgeless graph |I| is exactly binomial, so domination is tight.
    const auto e = check_lemmas(empty_graph(8), lambdas, betas, rng);
    CHECK(e.domination.checks == 3 * 8);
    CHECK(e.domination.violations == 0);
    CHECK(e.remove_edge.checks == 0);
    CHECK_THROWS_AS(check_lemmas(empty_graph(20), lambdas, betas, rng), SizeLimitError);
  }

  TEST_CASE("lemma suite run is reproducible") {
    auto spec = parse_experiment_spec(Json{{"kind", "lemma_suite"}, {"seed", 3}, {"graphs", 30}, {"n_max", 8}});
    const auto a = run_experiment(spec);
    const auto b = run_experiment(spec);
    CHECK(a.passed);
    CHECK(a.summary.at("violations") == 0);
    CHECK(strip_timing(a.rows) == strip_timing(b.rows));
    CHECK(summarize(spec, a.rows) == a.summary);
    spec.seed = 4;
    CHECK(strip_timing(run_experiment(spec).rows) != strip_timing(a.rows));
  }

  TEST_CASE("concentration with the zero potential has no variance") {
    auto j = base("concentration");
    j["instance"]["potential"] = {{"family", "zero"}};
    j["n"] = 50;
    j["trials"] = 10;
    const auto out = run_experiment(parse_experiment_spec(j));
    CHECK(out.summary.at("variance").get<double>() == 0.0);
    CHECK(out.summary.at("failure_rate").get<double>() == 0.0);
    CHECK(out.summary.at("mean").get<double>() == doctest::Approx(std::pow(1.0 + 2.0 / 50, 50)));
    CHECK(out.passed);
  }

  TEST_CASE("concentration rows carry exact values") {
    auto j = base("concentration");
    j["n"] = 12;
    j["trials"] = 5;
    const auto spec = parse_experiment_spec(j);
    const auto out = run_experiment(spec);
    REQUIRE(out.rows.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& r = out.rows[i];
      CHECK(r.at("replicate") == i);
      CHECK(r.at("method") == "exact");
      Rng rng = make_stream(spec.seed, i);
      const auto g = sample_graph(spec.instance->region(), spec.instance->potential(), 12, rng);
      CHECK(r.at("z").get<double>() == doctest::Approx(partition_exact(g, {2.0 / 12, 0.0})));
    }
  }

  TEST_CASE("approximate_z on the Poisson case") {
    auto j = base("approximate_z");
    j["instance"]["potential"] = {{"family", "zero"}};
    j["n"] = 400;
    j["trials"] = 4;
    j["eps"] = 0.05;
    j["oracle"] = {{"samples_per_order", 100}};
    const auto out = run_experiment(parse_experiment_spec(j));
    CHECK(out.passed);
    CHECK(out.summary.at("successes") == 4);
    CHECK(out.summary.at("oracle_value").get<double>() == doctest::Approx(std::exp(2.0)).epsilon(1e-3));
  }

  TEST_CASE("sample_validate rows and summary") {
    auto j = base("sample_validate");
    j["n"] = 100;
    j["draws"] = 500;
    j["oracle"] = {{"samples_per_order", 2000}};
    const auto spec = parse_experiment_spec(j);
    const auto out = run_experiment(spec);
    CHECK(out.rows.size() == 502);
    CHECK(summarize(spec, out.rows) == out.summary);
    CHECK(out.summary.contains("count_tv"));
    CHECK(out.summary.contains("void_passed"));
    CHECK(out.summary.contains("domination_passed"));
  }

  TEST_CASE("connective and ssm runs") {
    Json c = {{"kind", "connective"},
              {"seed", 2},
              {"instance",
               {{"region", {{"sides", {3.0, 3.0}}}},
                {"potential", {{"family", "hard_sphere"}, {"r", 0.15}}},
                {"lambda", 1.0}}},
              {"n", 60},
              {"calibration_graphs", 3},
              {"test_graphs", 4},
              {"pwcc_samples", 20000}};
    const auto out = run_experiment(parse_experiment_spec(c));
    CHECK(out.rows.size() == 8);
    CHECK(out.summary.at("test_graphs") == 4);
    CHECK(out.summary.at("delta_phi").get<double>() > 0.0);

    const auto s = run_experiment(parse_experiment_spec(
        Json{{"kind", "ssm"}, {"paths", {{{"n", 12}, {"root", 0}}, {{"n", 13}, {"root", 6}}}}, {"distances", {1, 2, 3, 4}}}));
    CHECK(s.passed);
    CHECK(s.rows.size() == 8);
  }

  TEST_CASE("output files round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "gibbsgraph_exp_test";
    std::filesystem::remove_all(dir);
    const auto spec = parse_experiment_spec(Json{{"kind", "lemma_suite"}, {"seed", 9}, {"graphs", 6}});
    const auto out = run_experiment(spec);
    write_experiment_output(spec, out, dir);
    const auto [back, rows] = read_experiment_rows(dir);
    CHECK(back.resolved() == spec.resolved());
    CHECK(rows == out.rows);
    CHECK(summarize(back, rows) == out.summary);
    CHECK_THROWS_AS(read_experiment_rows(dir / "missing.jsonl"), ConfigError);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("shipped configs parse" * doctest::test_suite("experiments")) {
  const std::filesystem::path dir = std::filesystem::path(GIBBSGRAPH_SOURCE_DIR) / "configs";
  int experiments = 0;
  for (const char* name : {"concentration", "expected_partition", "approximate_z", "sample_validate",
                           "lemma_suite", "connective", "ssm"}) {
    CHECK_NOTHROW(load_experiment_spec(dir / (std::string(name) + ".json")));
    ++experiments;
  }
  CHECK(experiments == 7);
}
