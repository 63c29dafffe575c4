#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dslab/cli.hpp"

using namespace dslab;
namespace fs = std::filesystem;

#ifndef DSLAB_GOLDEN_DIR
#error "DSLAB_GOLDEN_DIR must be defined"
#endif

namespace {

struct RunResult {
  int code = 0;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("dslab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunResult invoke(std::vector<std::string> args, const fs::path& dir) {
  args.push_back("--out-dir");
  args.push_back(dir.string());
  std::ostringstream out, err;
  RunResult r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Numbers agree to a relative 1e-6 with an absolute floor for rounding-level quantities.
void compare(const nlohmann::json& want, const nlohmann::json& got, const std::string& path) {
  CAPTURE(path);
  if (want.is_number() && got.is_number()) {
    const double a = want.get<double>(), b = got.get<double>();
    CHECK(std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)) + 1e-9);
    return;
  }
  REQUIRE(want.type() == got.type());
  if (want.is_object()) {
    CHECK(want.size() == got.size());
    for (auto it = want.begin(); it != want.end(); ++it) {
      REQUIRE(got.contains(it.key()));
      compare(it.value(), got.at(it.key()), path + "." + it.key());
    }
  } else if (want.is_array()) {
    REQUIRE(want.size() == got.size());
    for (size_t i = 0; i < want.size(); ++i) compare(want[i], got[i], path + "[" + std::to_string(i) + "]");
  } else {
    CHECK(want == got);
  }
}

void golden(const std::string& name, const std::vector<std::string>& args) {
  const auto dir = scratch(name);
  const auto r = invoke(args, dir);
  REQUIRE(r.code == 0);
  const auto got = load(dir / (args.front() + ".json"));
  CHECK(got["status"] == "ok");
  CHECK(got["spec_version"] == kSpecVersion);
  const fs::path gold = fs::path(DSLAB_GOLDEN_DIR) / (name + ".json");
  if (std::getenv("DSLAB_UPDATE_GOLDEN")) {
    fs::create_directories(gold.parent_path());
    write_atomic(gold.string(), dump_json(got) + "\n");
  }
  REQUIRE(fs::exists(gold));
  compare(load(gold), got, name);
}

}  // namespace

TEST_CASE("golden summaries") {
  SUBCASE("contour") { golden("contour", {"contour"}); }
  SUBCASE("symbol-check") { golden("symbol_check", {"symbol-check", "--model", "perturbed-ds"}); }
  SUBCASE("curvature") { golden("curvature", {"curvature", "--model", "perturbed-ds"}); }
  SUBCASE("flow") { golden("flow", {"flow", "--model", "exact-ds", "--ensemble", "20"}); }
  SUBCASE("transport") { golden("transport", {"transport", "--model", "exact-ds", "--order", "1"}); }
  SUBCASE("residue") { golden("residue", {"residue", "--model", "exact-ds", "--n", "4"}); }
}

TEST_CASE("runs are bit-for-bit reproducible") {
  const std::vector<std::string> args{"flow", "--model", "perturbed-ds", "--ensemble", "10", "--seed", "7"};
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(invoke(args, a).code == 0);
  REQUIRE(invoke(args, b).code == 0);
  CHECK(slurp(a / "flow.json") == slurp(b / "flow.json"));
  CHECK(slurp(a / "flow.csv") == slurp(b / "flow.csv"));
  const auto c = scratch("det_c");
  auto other = args;
  other.back() = "8";
  REQUIRE(invoke(other, c).code == 0);
  CHECK(slurp(a / "flow.csv") != slurp(c / "flow.csv"));
}

TEST_CASE("configuration errors exit with 2 and write nothing") {
  const auto dir = scratch("bad");
  CHECK(invoke({"contour", "--C", "0.5"}, dir).code == 2);
  CHECK(invoke({"flow", "--model", "anti-de-sitter"}, dir).code == 2);
  CHECK(invoke({"residue", "--n", "5"}, dir).code == 2);
  CHECK(invoke({"transport", "--no-such-flag"}, dir).code == 2);
  CHECK(invoke({}, dir).code == 2);
  const fs::path cfg = dir / "bad.ini";
  std::ofstream(cfg) << "model = exact-ds\n[contour]\nepsilon = banana\n";
  CHECK(invoke({"--config", cfg.string(), "contour"}, dir).code == 2);
  std::ofstream(cfg) << "model = exact-ds\nunknown_key = 3\n";
  CHECK(invoke({"--config", cfg.string(), "contour"}, dir).code == 2);
  fs::remove(cfg);
  CHECK(fs::is_empty(dir));
}

TEST_CASE("config file values and flag overrides") {
  const auto dir = scratch("cfg");
  const fs::path cfg = dir / "run.ini";
  std::ofstream(cfg) << "model = flat\nseed = 3\n[symbol-check]\nn_samples = 12\n";
  auto r = invoke({"--config", cfg.string(), "symbol-check"}, dir);
  REQUIRE(r.code == 0);
  auto j = load(dir / "symbol-check.json");
  CHECK(j["config"]["model"] == "flat");
  CHECK(j["config"]["n_samples"] == 12);
  r = invoke({"--config", cfg.string(), "symbol-check", "--n-samples", "5"}, dir);
  REQUIRE(r.code == 0);
  j = load(dir / "symbol-check.json");
  CHECK(j["config"]["n_samples"] == 5);
  CHECK(j["result"]["n_samples"] == 5);
}

TEST_CASE("numerical failures exit with 3 and record the error") {
  const auto dir = scratch("numfail");
  const auto r = invoke({"contour", "--eta", "0.5"}, dir);
  CHECK(r.code == 3);
  const auto j = load(dir / "contour.json");
  CHECK(j["status"] == "error");
  CHECK(j["error"]["code"] == "BadParams");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
}

TEST_CASE("residue pipeline through the runner") {
  const auto dir = scratch("residue");
  const auto r = invoke({"residue", "--model", "exact-ds", "--n", "4", "--emit-gnuplot"}, dir);
  REQUIRE(r.code == 0);
  const auto j = load(dir / "residue.json");
  CHECK(j["result"]["rel_err"].get<double>() < 1e-3);
  CHECK(j["result"].contains("residue_re"));
  CHECK(j["result"].contains("residue_im"));
  CHECK(j["result"].contains("oracle_value"));
  CHECK(j["result"]["eps_sequence"].size() == 4);
  CHECK(fs::exists(dir / "residue_eps.dat"));
  CHECK(r.out.find("\"spec_version\"") != std::string::npos);
}

TEST_CASE("flow ensemble of 200 trajectories") {
  const auto dir = scratch("flow200");
  REQUIRE(invoke({"flow", "--model", "exact-ds", "--ensemble", "200"}, dir).code == 0);
  std::istringstream csv(slurp(dir / "flow.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0, max_time = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    max_time += line.find("MaxTime") != std::string::npos;
  }
  CHECK(rows == 200);
  CHECK(max_time == 0);
  CHECK(load(dir / "flow.json")["result"]["max_time_count"] == 0);
}

TEST_CASE("gnuplot files and transport grid") {
  const auto dir = scratch("plots");
  REQUIRE(invoke({"transport", "--model", "exact-ds", "--grid-csv", "--emit-gnuplot"}, dir).code == 0);
  CHECK(fs::exists(dir / "transport_grid.csv"));
  CHECK(fs::exists(dir / "transport_u0.dat"));
  REQUIRE(invoke({"contour", "--emit-gnuplot"}, dir).code == 0);
  CHECK(fs::exists(dir / "contour_nodes.dat"));
}
