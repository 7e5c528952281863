#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "parmx/runconfig.hpp"

using namespace parmx;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(PARMX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string config_path(const std::string& name) {
    return std::string(PARMX_CONFIG_DIR) + "/" + name;
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("parmx_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run config parsing and validation") {
    RunConfig cfg = RunConfig::load(config_path("constant_k.json"));
    ProblemSpec spec = cfg.problem();
    CHECK(spec.field.is_constant());
    CHECK(spec.T == 0.5);
    CHECK(cfg.grid_xs(spec).size() == 129);
    CHECK(cfg.grid_ts(spec).size() == 65);
    CHECK(!cfg.hash().empty());

    SUBCASE("seed override changes the hash") {
        std::string h0 = cfg.hash();
        cfg.override_seed(999);
        CHECK(cfg.seed() == 999);
        CHECK(cfg.hash() != h0);
    }
    SUBCASE("malformed json names the problem") {
        CHECK_THROWS_AS(RunConfig::from_json_text("{nope"), ConfigError);
        CHECK_THROWS_WITH_AS(
            RunConfig::from_json_text(R"({"problem":{"coefficient":{"type":42}}})"),
            doctest::Contains("type"), ConfigError);
        CHECK_THROWS_AS(RunConfig::from_json_text(R"({"seed":1})"), ConfigError);
    }
    SUBCASE("empty test-function panel is invalid") {
        std::string text = slurp(config_path("constant_k.json"));
        auto pos = text.find("\"count\": 20");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 11, "\"count\": 0");
        CHECK_THROWS_AS(RunConfig::from_json_text(text), ConfigError);
    }
}

TEST_CASE("solve writes deterministic outputs with provenance headers") {
    fs::path out1 = temp_dir("solve1");
    fs::path out2 = temp_dir("solve2");
    // A coarse grid override keeps this smoke test quick.
    std::string text = slurp(config_path("constant_k.json"));
    auto pos = text.find("\"nx\": 129");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 9, "\"nx\": 17");
    pos = text.find("\"nt\": 65");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 8, "\"nt\": 9");
    fs::path cfgp = temp_dir("cfg") / "small.json";
    std::ofstream(cfgp) << text;

    REQUIRE(run_cli("solve --config " + cfgp.string() + " --out " + out1.string()) == 0);
    REQUIRE(run_cli("solve --config " + cfgp.string() + " --out " + out2.string()) == 0);

    std::string csv1 = slurp(out1 / "solution.csv");
    std::string csv2 = slurp(out2 / "solution.csv");
    CHECK(csv1 == csv2);
    CHECK(csv1.rfind("# config=", 0) == 0);
    CHECK(csv1.find(" seed=") != std::string::npos);

    // one header line + one column line + nx*nt rows
    size_t rows = 0;
    for (char c : csv1)
        if (c == '\n') ++rows;
    CHECK(rows == 2 + 17 * 9);

    CHECK(fs::exists(out1 / "solution_plot.gp"));
    CHECK(fs::exists(out1 / "norms.csv"));
}

TEST_CASE("solve exit codes") {
    fs::path out = temp_dir("codes");
    SUBCASE("missing config file") {
        CHECK(run_cli("solve --config /nonexistent.json --out " + out.string()) == 2);
    }
    SUBCASE("malformed config") {
        fs::path cfgp = out / "bad.json";
        std::ofstream(cfgp) << "{ not json";
        CHECK(run_cli("solve --config " + cfgp.string() + " --out " + out.string()) == 2);
    }
}

TEST_CASE("study l2decay on zero forcing emits an all-zero table and passes") {
    fs::path out = temp_dir("l2zero");
    std::string text = slurp(config_path("constant_k.json"));
    // shrink the grid; the study solves its own ladder
    fs::path cfgp = out / "cfg.json";
    std::ofstream(cfgp) << text;
    CHECK(run_cli("study --kind l2decay --config " + cfgp.string() + " --out " +
                  out.string()) == 0);
    std::string csv = slurp(out / "l2decay_study.csv");
    CHECK(csv.find("delta,l2_Wf,l2_Wfx,l2_WGx") != std::string::npos);
    CHECK(csv.find("0.4,0,0,0") != std::string::npos);
}

TEST_CASE("study mollify on smooth data is trivially cauchy") {
    fs::path out = temp_dir("mollify");
    std::ostringstream cfg;
    cfg << R"({
  "seed": 7,
  "problem": {
    "coefficient": {"type": "constant", "k": 1.0},
    "forcing": {"type": "gaussian", "amplitude": 1.0, "center": 0.0, "width": 1.0},
    "T": 0.2, "L": 6.0
  },
  "grid": {"nx": 9, "nt": 3},
  "epsilons": [0.2, 0.1, 0.05]
})";
    fs::path cfgp = out / "cfg.json";
    std::ofstream(cfgp) << cfg.str();
    CHECK(run_cli("study --kind mollify --config " + cfgp.string() + " --out " +
                  out.string()) == 0);
    CHECK(fs::exists(out / "mollify_study.csv"));
}
