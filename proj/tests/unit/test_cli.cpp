#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "../support.hpp"
#include "cptmdp/cli.hpp"
#include "cptmdp/errors.hpp"
#include "cptmdp/io.hpp"

using namespace cptmdp;
using cptmdp::testing::fixture;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cptmdp");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "cptmdp_cli_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("solve prints pure JSON on the result stream") {
    RunResult r = run_cli({"solve", "--model", fixture("running.json"), "--epsilon", "0.01"});
    REQUIRE(r.code == kExitOk);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["value"].get<double>() == doctest::Approx(11.50132).epsilon(1e-4));
    CHECK(doc["mode"] == "cpt");
    CHECK(doc["outcomes"].size() == 4);
    CHECK(doc["stats"].contains("lp_calls"));
    CHECK(r.err.find("wall_time") != std::string::npos);
}

TEST_CASE("expected-utility mode on the running example") {
    RunResult r = run_cli({"solve", "--model", fixture("running.json"), "--mode", "eu"});
    REQUIRE(r.code == kExitOk);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["value"].get<double>() == doctest::Approx(23.3).epsilon(1e-9));
    CHECK(doc["strategy"]["choices"]["s0"]["a2"].get<double>() == 1.0);
}

TEST_CASE("parameter files select the loss ranking") {
    RunResult r = run_cli({"solve", "--model", fixture("running.json"), "--params", fixture("params_reference_first.json")});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == doctest::Approx(11.87776).epsilon(1e-4));
    CptParams p = load_params(fixture("params_piecewise.json"));
    CHECK(p.lip_source == LipSource::Exact);
    CHECK(parse_params(serialize_params(p)).lip_gain == p.lip_gain);
    CHECK_THROWS_AS(parse_params(R"({"loss_ranking": "sideways"})"), ParseError);
    CHECK_THROWS_AS(parse_params(R"({"weight_gain": {"kind": "tk", "exponent": 0.1}})"), ValidationError);
}

TEST_CASE("exit codes") {
    RunResult r = run_cli({"solve", "--model", fixture("total_reward.json")});
    CHECK(r.code == kExitInvalid);
    CHECK(r.out.empty());
    CHECK(r.err.find("total-reward") != std::string::npos);
    CHECK(run_cli({"solve"}).code == kExitInvalid);
    CHECK(run_cli({"solve", "--model", fixture("running.json"), "--epsilon", "-1"}).code == kExitInvalid);
    CHECK(run_cli({"solve", "--model", fixture("running.json"), "--mode", "mv"}).code == kExitInvalid);
    CHECK(run_cli({"solve", "--model", fixture("missing.json")}).code == kExitInvalid);
    r = run_cli({"solve", "--model", fixture("two_coupon.json"), "--no-bnb", "--epsilon", "1e-3"});
    CHECK(r.code == kExitSolver);
    CHECK(r.err.find("budget") != std::string::npos);
}

TEST_CASE("output files and plot data") {
    fs::path dir = scratch_dir();
    RunResult r = run_cli({"solve", "--model", fixture("fig4.json"), "--out", (dir / "r.json").string(),
                           "--frontier-out", (dir / "f.json").string(), "--strategy-out",
                           (dir / "s.json").string(), "--plot-out", (dir / "p.csv").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.empty());
    nlohmann::json result = nlohmann::json::parse(slurp(dir / "r.json"));
    CHECK(result["frontier"] == nlohmann::json::parse(slurp(dir / "f.json")));
    CHECK(result["strategy"] == nlohmann::json::parse(slurp(dir / "s.json")));
    CHECK(slurp(dir / "p.csv") == "x,y\n0,0.8\n0.5,0.5\n0.8,0\n");
}

TEST_CASE("two-dimensional plot data lists vertices in order") {
    ParetoApprox pa{{{0.8, 0.0}, {0.0, 0.8}, {0.5, 0.5}}, {}, 0.0};
    CHECK(frontier_plot_csv(pa) == "x,y\n0,0.8\n0.5,0.5\n0.8,0\n");
    ParetoApprox single{{{0.3, 0.7}}, {}, 0.0};
    CHECK(frontier_plot_csv(single) == "x,y\n0.3,0.7\n");
}

TEST_CASE("golden outputs of the bundled examples") {
    const fs::path golden = fs::path(CPTMDP_GOLDEN_DIR);
    for (const char* name : {"running", "two_coupon", "fig3", "fig4", "randomization"}) {
        CAPTURE(name);
        RunResult a = run_cli({"solve", "--model", fixture(std::string(name) + ".json")});
        RunResult b = run_cli({"solve", "--model", fixture(std::string(name) + ".json")});
        REQUIRE(a.code == kExitOk);
        CHECK(a.out == b.out);
        CHECK(a.out == slurp(golden / (std::string(name) + ".json")));
    }
}
