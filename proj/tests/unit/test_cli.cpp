#include <doctest.h>

#ifdef GIBBSGRAPH_HAVE_CLI

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gibbsgraph/io.hpp"

using namespace gibbsgraph;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gibbsgraph");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("gibbsgraph_cli_" + std::to_string(counter_++))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const Json& j) const {
    std::ofstream(path_ / name) << j.dump();
    return path_ / name;
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Json kGraphSpec = {{"region", {{"sides", {2.0, 2.0}}}},
                         {"potential", {{"family", "gaussian_overlap"}, {"eps", 1.0}, {"sigma", 0.2}}},
                         {"n", 40},
                         {"seed", 3}};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors") {
    CHECK(invoke({}).code == cli::kUsageError);
    CHECK(invoke({"frobnicate"}).code == cli::kUsageError);
    CHECK(invoke({"--help"}).code == cli::kOk);
    CHECK(invoke({"graph"}).code == cli::kUsageError);
    CHECK(invoke({"graph", "--spec", "/nonexistent/spec.json"}).code == cli::kUsageError);
  }

  TEST_CASE("graph command") {
    TempDir dir;
    Json zero = kGraphSpec;
    zero["potential"] = {{"family", "zero"}};
    const auto z = invoke({"graph", "--spec", dir.write("zero.json", zero).string()});
    REQUIRE(z.code == cli::kOk);
    CHECK(Json::parse(z.out).at("edges") == Json::array());

    const auto spec = dir.write("g.json", kGraphSpec).string();
    const auto a = invoke({"graph", "--spec", spec});
    const auto b = invoke({"graph", "--spec", spec});
    CHECK(a.code == cli::kOk);
    CHECK(a.out == b.out);
    CHECK(invoke({"graph", "--spec", spec, "--seed", "4"}).out != a.out);

    const auto out_dir = (dir.path() / "run").string();
    CHECK(invoke({"--spec", spec, "--out", out_dir, "graph"}).code == cli::kOk);
    CHECK(slurp(fs::path(out_dir) / "graph.json") == a.out);
    const auto g = graph_from_json(Json::parse(a.out));
    CHECK(g.size() == 40);

    Json bad = kGraphSpec;
    bad["potential"] = {{"family", "lennard_jones"}};
    CHECK(invoke({"graph", "--spec", dir.write("bad.json", bad).string()}).code == cli::kUsageError);
    bad = kGraphSpec;
    bad["n"] = 0;
    CHECK(invoke({"graph", "--spec", dir.write("bad2.json", bad).string()}).code == cli::kUsageError);
    std::ofstream(dir.path() / "broken.json") << "{\"n\": ";
    CHECK(invoke({"graph", "--spec", (dir.path() / "broken.json").string()}).code == cli::kUsageError);
  }

  TEST_CASE("estimate command") {
    TempDir dir;
    const Json inst = {{"region", {{"sides", {2.0}}}}, {"potential", {{"family", "zero"}}}, {"lambda", 0.0}};
    const auto r = invoke({"estimate", "--spec", dir.write("e.json", {{"instance", inst}}).string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(Json::parse(r.out).at("estimate").at("value") == 1.0);

    Json poisson = {{"instance", inst}, {"method", "oracle"}, {"truncation", 14}, {"samples_per_order", 10}};
    poisson["instance"]["lambda"] = 1.0;
    const auto o = invoke({"estimate", "--spec", dir.write("o.json", poisson).string()});
    REQUIRE(o.code == cli::kOk);
    CHECK(Json::parse(o.out).at("estimate").at("value").get<double>() ==
          doctest::Approx(std::exp(2.0)).epsilon(1e-4));

    poisson["method"] = "guess";
    CHECK(invoke({"estimate", "--spec", dir.write("g.json", poisson).string()}).code == cli::kUsageError);
  }

  TEST_CASE("sample command") {
    TempDir dir;
    const Json spec = {{"instance",
                        {{"region", {{"sides", {2.0}}}},
                         {"potential", {{"family", "hard_sphere"}, {"r", 0.1}}},
                         {"lambda", 1.0}}},
                       {"n", 100},
                       {"count", 5},
                       {"seed", 8}};
    const auto path = dir.write("s.json", spec).string();
    const auto a = invoke({"sample", "--spec", path});
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == invoke({"sample", "--spec", path, "--threads", "1"}).out);
    std::istringstream lines(a.out);
    std::string line;
    std::getline(lines, line);
    CHECK(Json::parse(line).at("type") == "meta");
    int rows = 0;
    while (std::getline(lines, line)) {
      const auto row = Json::parse(line);
      CHECK(row.at("replicate") == rows);
      CHECK(row.at("points").size() == row.at("count").get<std::size_t>());
      ++rows;
    }
    CHECK(rows == 5);
  }

  TEST_CASE("experiment and analyze commands") {
    TempDir dir;
    const auto spec = dir.write("x.json", {{"kind", "lemma_suite"}, {"graphs", 6}, {"seed", 1}}).string();
    const auto out_dir = (dir.path() / "run").string();
    const auto r = invoke({"experiment", "--spec", spec, "--out", out_dir});
    REQUIRE(r.code == cli::kOk);
    CHECK(Json::parse(r.out).at("passed") == true);
    CHECK(fs::exists(fs::path(out_dir) / "rows.jsonl"));
    CHECK(fs::exists(fs::path(out_dir) / "summary.json"));
    const auto an = invoke({"analyze", "--in", out_dir});
    CHECK(an.code == cli::kOk);
    CHECK(Json::parse(an.out) == Json::parse(r.out));

    const auto ssm = dir.write("ssm.json", {{"kind", "ssm"}, {"paths", {{{"n", 10}, {"root", 0}}}}, {"distances", {1, 2, 3}}}).string();
    const auto ssm_dir = dir.path() / "ssm";
    CHECK(invoke({"experiment", "--spec", ssm, "--out", ssm_dir.string()}).code == cli::kOk);
    CHECK(slurp(ssm_dir / "decay_0.csv").rfind("root,s,gap\n", 0) == 0);

    CHECK(invoke({"experiment", "--spec", dir.write("k.json", {{"kind", "astrology"}}).string()}).code ==
          cli::kUsageError);
    CHECK(invoke({"analyze", "--in", (dir.path() / "nothing").string()}).code == cli::kUsageError);
  }

  TEST_CASE("failed experiments exit 1") {
    TempDir dir;
    // Gaps at distance 1..3 cannot be strictly decreasing when lambda = 0.
    const auto spec =
        dir.write("f.json", {{"kind", "ssm"}, {"ssm_lambda", 0.0}, {"paths", {{{"n", 8}, {"root", 0}}}}, {"distances", {1, 2}}})
            .string();
    CHECK(invoke({"experiment", "--spec", spec, "--out", (dir.path() / "f").string()}).code ==
          cli::kAssertionFailed);
  }
}

#endif
