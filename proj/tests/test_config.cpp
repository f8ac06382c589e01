#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sobolab/runner.hpp"

using namespace sobolab;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sobolab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_cfg(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parsing") {
  const RunConfig c = parse_config(
      "seed: 5\n"
      "depth_cap: 9\n"
      "experiments:\n"
      "  - kind: constants\n"
      "    depth: 6\n"
      "    sigma: {kind: power, a: [-0.5]}\n"
      "    kernel: {family: riesz, alpha: 0.0}\n"
      "    s: 0.1\n"
      "  - kind: goodbad\n"
      "    name: gb\n"
      "    r: [2, 3]\n",
      "cfg");
  CHECK(*c.seed == 5);
  CHECK(*c.depth_cap == 9);
  REQUIRE(c.experiments.size() == 2);
  CHECK(c.experiments[0].kind == ExperimentKind::constants);
  CHECK(c.experiments[0].name == "constants_0");
  CHECK(c.experiments[0].line == 4);
  CHECK(c.experiments[0].sigma.a[1] == -0.5);
  CHECK(c.experiments[0].kernel.family == KernelFamily::riesz);
  CHECK(c.experiments[0].s == std::vector<double>{0.1});
  CHECK(c.experiments[1].r == std::vector<int>{2, 3});
  CHECK(parse_config("", "cfg").experiments.empty());
  CHECK(parse_config("experiments: []\n", "cfg").experiments.empty());
  CHECK_NOTHROW(load_config(std::string(SOBOLAB_SOURCE_DIR) + "/configs/smoke.cfg"));
}

TEST_CASE("errors name the field and the line") {
  const std::string bad_family = config_error(
      "experiments:\n"
      "  - kind: t1\n"
      "    kernel:\n"
      "      family: hilbert\n");
  CHECK(bad_family.find("cfg:4:") != std::string::npos);
  CHECK(bad_family.find("kernel.family") != std::string::npos);
  CHECK(config_error("experiments:\n  - kind: t1\n    depht: 4\n").find("cfg:3: unknown field 'depht'") !=
        std::string::npos);
  CHECK(config_error("experiments:\n  - kind: nope\n").find("cfg:2:") != std::string::npos);
  CHECK(config_error("experiments:\n  - kind: goodbad\n    eps: [0.5, 1.5]\n").find("'eps'") != std::string::npos);
  CHECK(config_error("experiments:\n  - kind: t1\n    name: a\n  - kind: t1\n    name: a\n").find("duplicate") !=
        std::string::npos);
  CHECK(config_error("experiments: [\n").find("cfg:") == 0);
  CHECK(config_error("experiments:\n  - {kind: t1, sigma: {kind: power, a: [-1.5]}}\n").find("sigma.a") !=
        std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), Error);
}

TEST_CASE("csv helpers") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  RunOptions o;
  o.out_dir = (dir / "out").string();

  SUBCASE("empty list writes only the manifest") {
    o.config_path = write_cfg(dir, "experiments: []\n");
    CHECK(run(o) == 0);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(o.out_dir)) names.push_back(e.path().filename().string());
    CHECK(names == std::vector<std::string>{"manifest.json"});
    const auto man = nlohmann::json::parse(slurp(fs::path(o.out_dir) / "manifest.json"));
    CHECK(man["experiments"].empty());
    CHECK(man["seed"] == kDefaultSeed);
  }
  SUBCASE("missing config") {
    o.config_path = (dir / "missing.cfg").string();
    std::string diag;
    CHECK(run(o, &diag) == 2);
    CHECK(!diag.empty());
  }
  SUBCASE("invalid config") {
    o.config_path = write_cfg(dir, "experiments:\n  - kind: t1\n    kernel: {family: hilbert}\n");
    std::string diag;
    CHECK(run(o, &diag) == 2);
    CHECK(diag.find("run.cfg:3:") != std::string::npos);
  }
  SUBCASE("output directory cannot be created") {
    o.config_path = write_cfg(dir, "experiments: []\n");
    std::ofstream(dir / "blocker") << "x";
    o.out_dir = (dir / "blocker" / "out").string();
    CHECK(run(o) == 2);
  }
  SUBCASE("experiment error") {
    o.config_path = write_cfg(dir, "depth_cap: 6\nexperiments:\n  - kind: t1\n    depth: 8\n");
    CHECK(run(o) == 3);
    const auto man = nlohmann::json::parse(slurp(fs::path(o.out_dir) / "manifest.json"));
    CHECK(man["experiments"][0]["status"] == "error");
    CHECK(slurp(fs::path(o.out_dir) / "t1.csv").find(",error,") != std::string::npos);
  }
  SUBCASE("failed check") {
    // Two r values that are both certainly bad give a flat slope.
    o.config_path = write_cfg(dir, "experiments:\n  - kind: goodbad\n    depth: 4\n    r: [2, 3]\n    trials: 200\n");
    CHECK(run(o) == 1);
    const auto man = nlohmann::json::parse(slurp(fs::path(o.out_dir) / "manifest.json"));
    CHECK(man["experiments"][0]["status"] == "check_failed");
    CHECK(man["experiments"][0]["checks_failed"] == 1);
  }
  SUBCASE("seed precedence") {
    o.config_path = write_cfg(dir, "seed: 77\nexperiments: []\n");
    CHECK(run(o) == 0);
    CHECK(nlohmann::json::parse(slurp(fs::path(o.out_dir) / "manifest.json"))["seed"] == 77);
    o.seed = 78;
    CHECK(run(o) == 0);
    CHECK(nlohmann::json::parse(slurp(fs::path(o.out_dir) / "manifest.json"))["seed"] == 78);
  }
}
