#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "spikes/errors.hpp"
#include "spikes/ledger.hpp"

using namespace spikes;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("spikes_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("run configuration round trip")
{
    const nlohmann::json in = {
        {"domain", {{"shape", "rectangle"}, {"extents", {0, 1, 0, 2}}, {"epsilon", 0.05}, {"h", 0.25}}},
        {"p", 2.5},
        {"rho", 10},
        {"eta", 0.4},
        {"delta", 1.5},
        {"k_target", 3},
        {"points", {{0.25, 0.5}, {0.75, 1.5}}},
        {"tolerances", {{"fixed_point", 1e-11}, {"c_bar", 1e-7}}},
        {"output_dir", "out"},
        {"seed", 17},
        {"jobs", 2}};
    const RunConfig c = run_config_from_json(in);
    CHECK(c.dim() == 2);
    CHECK(c.p == 2.5);
    CHECK_FALSE(c.ladder);
    CHECK(c.k_target == 3);
    CHECK(c.points.size() == 2);
    CHECK(c.tol_fp == 1e-11);
    CHECK(c.c_bar == 1e-7);
    CHECK(c.tol_orth == 1e-9);
    CHECK(c.ground_state_radius() == 50.0);

    const nlohmann::json out = to_json(c);
    CHECK(to_json(run_config_from_json(out)) == out);
    CHECK(config_hash(run_config_from_json(out)) == config_hash(c));
}

TEST_CASE("hash ignores locations and parallelism only")
{
    RunConfig a;
    RunConfig b = a;
    b.output_dir = "elsewhere";
    b.cache_dir = "/tmp/cache";
    b.jobs = 8;
    CHECK(config_hash(a) == config_hash(b));
    b.rho = 9.0;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
    // FNV-1a reference value for the empty string.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("invalid configurations are rejected")
{
    CHECK_THROWS_AS(run_config_from_json({{"p", 0.5}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"eta", 1.5}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"k_target", "many"}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"rho", "eight"}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"domain", {{"shape", "torus"}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::array()), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("ground-state cache returns the same table")
{
    const auto dir = scratch("cache");
    bool hit = true;
    const auto first = cached_ground_state(1, 3.0, 60.0, 1e-10, dir.string(), &hit);
    CHECK_FALSE(hit);
    const auto second = cached_ground_state(1, 3.0, 60.0, 1e-10, dir.string(), &hit);
    CHECK(hit);
    CHECK(std::abs(first->gamma - second->gamma) < 1e-12);
    CHECK(std::abs(first->energy - second->energy) < 1e-12);
    CHECK(std::abs(first->lambda1 - second->lambda1) < 1e-12);
    double worst = 0.0;
    for (std::size_t i = 0; i < first->w_vals.size(); ++i)
        worst = std::max(worst, std::abs(first->w_vals[i] - second->w_vals[i]));
    CHECK(worst < 1e-12);
    // A different key is a miss.
    cached_ground_state(1, 3.0, 61.0, 1e-10, dir.string(), &hit);
    CHECK_FALSE(hit);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cache directory resolution")
{
    CHECK(resolve_cache_dir("explicit") == "explicit");
}

TEST_CASE("number formatting round-trips")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
        const std::string s = format_number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("append-only ledger keeps one header")
{
    const auto dir = scratch("ledger");
    const std::string path = (dir / "ledger.csv").string();
    append_csv(path, run_summary("energy", "abc", 2, 1.5, 0.1, true));
    append_csv(path, run_summary("ladder", "def", 3, 2.5, 3.0, false));
    std::ifstream in(path);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "command,config_hash,k,M_eps,metric,pass");
    CHECK(lines[2] == "ladder,def,3,2.5,3,0");

    CsvTable other;
    other.header = {"x"};
    CHECK_THROWS_AS(append_csv(path, other), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("ladder table layout")
{
    const Ansatz a(fixtures::ground_state(1), Domain::interval(0, 1, 0.02), 0.1);
    const LadderResult L = run_ladder(a, 8.0, 2);
    const CsvTable t = ladder_table(L, "0123456789abcdef", 1);
    REQUIRE(t.header.size() == 27);
    CHECK(t.header.front() == "config_hash");
    CHECK(t.header[25] == "positions");
    CHECK(t.rows.size() == L.steps.size());
    for (const auto& r : t.rows) {
        CHECK(r.size() == t.header.size());
        CHECK(r[0] == "0123456789abcdef");
    }
}
