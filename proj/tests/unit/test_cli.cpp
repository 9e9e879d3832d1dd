#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "polymoments/cli.hpp"
#include "polymoments/errors.hpp"
#include "support.hpp"

using namespace polymoments;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json jacobi_config() {
  return json::parse(R"({
    "command": "moments",
    "seed": 1,
    "generator": {"dim": 1, "drift": [[]],
                  "diffusion": [[[{"alpha": [1], "c": 2.0}, {"alpha": [2], "c": -2.0}]]]},
    "k": 2, "y0": [0.5], "T": 1.0,
    "coefficients": [0, 0, 1],
    "mc": {"n_paths": 20000, "dt": 0.01,
           "sigma": [[{"sqrt": [{"alpha": [1], "c": 2.0}, {"alpha": [2], "c": -2.0}]}]],
           "box": {"lower": [0.0], "upper": [1.0]}}
  })");
}

json run_json(const json& cfg, cli::Mode mode = cli::Mode::kRun, unsigned threads = 1) {
  return json::parse(cli::execute(cfg, {mode, cli::Format::kJson, threads, false}).output);
}

fs::path tmp_dir() {
  fs::path p(POLYMOMENTS_TEST_TMP);
  fs::create_directories(p);
  return p;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string("\"") + POLYMOMENTS_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("moments command") {
  const auto out = run_json(jacobi_config());
  CHECK(out["command"] == "moments");
  CHECK(out["seed"] == 1);
  CHECK(out["tool_version"] == cli::kToolVersion);
  CHECK(out["rng"] == "philox4x32-10");
  const auto m = out["result"]["moments"];
  REQUIRE(m.size() == 3);
  CHECK(support::close(m[0].get<double>(), 1.0, 1e-14));
  CHECK(support::close(m[1].get<double>(), 0.5, 1e-14));
  CHECK(support::close(m[2].get<double>(), 0.5 - 0.25 * std::exp(-2.0), 1e-10));
  CHECK(support::close(out["result"]["conditional_moment"].get<double>(), 0.5 - 0.25 * std::exp(-2.0), 1e-10));
}

TEST_CASE("config hash round trip") {
  const auto cfg = jacobi_config();
  const auto out = run_json(cfg);
  CHECK(out["config_hash"] == cli::config_hash(cfg));
  CHECK(cli::config_hash(json::parse(cfg.dump())) == cli::config_hash(cfg));
  auto other = cfg;
  other["seed"] = 2;
  CHECK(cli::config_hash(other) != cli::config_hash(cfg));
  CHECK(cli::config_hash(cfg).size() == 16);
}

TEST_CASE("signature command") {
  const auto out = run_json(json::parse(R"({"command": "signature", "seed": 0, "d": 2, "N": 4, "t": 1.0})"));
  const auto levels = out["result"]["levels"];
  REQUIRE(levels.size() == 5);
  CHECK(levels[0][""] == 1.0);
  CHECK(levels[2]["11"] == 0.5);
  CHECK(levels[2]["12"] == 0.0);
  CHECK(levels[4]["1122"] == 0.125);
}

TEST_CASE("compare reports z-scores") {
  const auto out = run_json(jacobi_config(), cli::Mode::kCompare);
  const auto rows = out["comparison"];
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r["flagged"] == false);
    CHECK(std::abs(r["z"].get<double>()) <= 3.0);
  }
  CHECK(out["result"]["n_flagged"] == 0);
}

TEST_CASE("Volterra k = 1 compare is deterministic in exact mode") {
  const auto cfg = json::parse(R"({
    "command": "vix-volterra", "seed": 4,
    "curve": {"form": "exponential", "b": 0.04, "gamma": 2.0},
    "kernel": {"form": "exponential", "omega": 0.5, "gamma": 2.0},
    "t": 0.5, "delta": 0.25, "k": 1,
    "mc": {"n_paths": 10, "exact": true}
  })");
  const auto rows = run_json(cfg, cli::Mode::kCompare)["comparison"];
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["mc_se"] == 0.0);
  CHECK(rows[0]["z"] == 0.0);
  CHECK(rows[0]["flagged"] == false);
}

TEST_CASE("rough Bergomi k = 3 compare") {
  const auto cfg = json::parse(R"({
    "command": "vix-bergomi", "seed": 9,
    "curve": {"form": "flat", "level": 0.04},
    "kernels": [{"form": "rough", "H": 0.1, "c": 0.5}],
    "t": 0.5, "k": 3,
    "mc": {"n_paths": 40000, "n_x": 32}
  })");
  const auto out = run_json(cfg, cli::Mode::kCompare);
  CHECK(std::abs(out["comparison"][0]["z"].get<double>()) <= 3.0);
  CHECK(out["result"]["analytic"]["moments"][0].contains("lognormal_bounds"));
}

TEST_CASE("simulate command and thread independence") {
  auto cfg = jacobi_config();
  cfg["command"] = "simulate";
  cfg["target"] = "moments";
  const auto a = cli::execute(cfg, {cli::Mode::kRun, cli::Format::kJson, 1, true});
  const auto b = cli::execute(cfg, {cli::Mode::kRun, cli::Format::kJson, 8, true});
  CHECK(a.output == b.output);
  CHECK(a.dump == b.dump);
  CHECK(a.dump.rfind("path_index,y0\n0,", 0) == 0);
  const auto out = json::parse(a.output);
  CHECK(out["result"]["moments"][2]["n_paths"] == 20000);
}

TEST_CASE("csv output") {
  const auto s = cli::execute(jacobi_config(), {cli::Mode::kCompare, cli::Format::kCsv, 1, false}).output;
  CHECK(s.rfind("# command=moments\n", 0) == 0);
  CHECK(s.find("\nquantity,analytic,mc_mean,mc_se,z,flagged\n") != std::string::npos);
  const auto r = cli::execute(jacobi_config(), {cli::Mode::kRun, cli::Format::kCsv, 1, false}).output;
  CHECK(r.find("\n/moments/2,0.46616") != std::string::npos);
}

TEST_CASE("config errors carry a field path") {
  auto cfg = jacobi_config();
  cfg.erase("seed");
  CHECK_THROWS_AS(cli::execute(cfg, {}), ConfigError);
  cfg = jacobi_config();
  cfg["seed"] = -3;
  CHECK_THROWS_AS(cli::execute(cfg, {}), ConfigError);
  cfg = jacobi_config();
  cfg["y0"] = json::array({0.5, 0.1});
  try {
    cli::execute(cfg, {});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "/y0");
  }
  cfg = jacobi_config();
  cfg["command"] = "frobnicate";
  CHECK_THROWS_AS(cli::execute(cfg, {}), ConfigError);
}

TEST_CASE("binary exit codes") {
  const auto dir = tmp_dir();
  const auto out = dir / "out.json";
  fs::remove(out);

  write(dir / "malformed.json", "{\"command\": \"moments\", ");
  CHECK(run_binary("run --config " + (dir / "malformed.json").string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));

  auto bad = jacobi_config();
  bad["generator"]["drift"] = json::parse(R"([[{"alpha": [2], "c": 1.0}]])");
  write(dir / "degree.json", bad.dump());
  CHECK(run_binary("run --config " + (dir / "degree.json").string() + " --out " + out.string()) == 3);
  CHECK_FALSE(fs::exists(out));

  write(dir / "ok.json", jacobi_config().dump());
  CHECK(run_binary("run --config " + (dir / "ok.json").string() + " --out " + out.string()) == 0);
  REQUIRE(fs::exists(out));
  const auto first = slurp(out);
  CHECK(run_binary("run --config " + (dir / "ok.json").string() + " --out " + out.string()) == 0);
  CHECK(slurp(out) == first);

  const auto dump = dir / "dump.csv";
  fs::remove(dump);
  CHECK(run_binary("compare --config " + (dir / "ok.json").string() + " --out " + out.string() + " --dump " +
                   dump.string() + " --threads 3") == 0);
  CHECK(fs::exists(dump));

  CHECK(run_binary("run --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_binary("run") == 2);
  CHECK(run_binary("run --config " + (dir / "ok.json").string() + " --format xml") == 2);
}
