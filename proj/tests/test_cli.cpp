#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "srint/cli.hpp"

using namespace srint;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("srint_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& text) {
    fs::path p = dir / "job.json";
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("riesz-min happy path writes artifacts") {
    fs::path dir = fresh_dir("riesz");
    std::string cfg = write_config(dir, R"({
        "command": "riesz-min",
        "region": {"kind": "box", "dim": 2, "corner": [0, 0], "side": 1.0},
        "n": 24, "s": 2.0, "k": 2, "seed": 1, "max_iters": 120, "emit_svg": true
    })");
    int rc = cli::run({"riesz-min", "--config", cfg, "--out", (dir / "out").string()});
    REQUIRE(rc == 0);
    CHECK(fs::exists(dir / "out" / "points.csv"));
    CHECK(fs::exists(dir / "out" / "trace.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "scatter.svg"));

    auto csv = slurp(dir / "out" / "points.csv");
    CHECK(csv.substr(0, 13) == "# dim=2 n=24\n");
    auto trace = slurp(dir / "out" / "trace.csv");
    CHECK(trace.substr(0, 27) == "iter,energy,grad_norm,step\n");
    auto svg = slurp(dir / "out" / "scatter.svg");
    CHECK(svg.substr(0, 5) == "<?xml");
    CHECK(svg.find("</svg>") != std::string::npos);

    auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["command"] == "riesz-min");
    CHECK(manifest["config"]["n"] == 24);
}

TEST_CASE("reproducibility: identical inputs give identical bytes") {
    fs::path dir = fresh_dir("repro");
    std::string cfg = write_config(dir, R"({
        "command": "riesz-min",
        "region": {"kind": "circle-periodic"},
        "n": 16, "s": 2.0, "k": 1, "seed": 3, "max_iters": 150, "restarts": 2
    })");
    REQUIRE(cli::run({"riesz-min", "--config", cfg, "--out", (dir / "a").string()}) == 0);
    REQUIRE(cli::run({"riesz-min", "--config", cfg, "--out", (dir / "b").string()}) == 0);
    CHECK(slurp(dir / "a" / "points.csv") == slurp(dir / "b" / "points.csv"));
    CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
}

TEST_CASE("config errors exit with 2 and name the key") {
    fs::path dir = fresh_dir("badcfg");
    std::string missing = write_config(dir, R"({"command": "riesz-min"})");
    CHECK(cli::run({"riesz-min", "--config", missing, "--out", dir.string()}) == 2);

    std::string unknown = write_config(dir, R"({
        "command": "riesz-min",
        "region": {"kind": "box", "corner": [0], "side": 1.0},
        "n": 8, "s": 2.0, "k": 1, "bogus_key": 1
    })");
    CHECK(cli::run({"riesz-min", "--config", unknown, "--out", dir.string()}) == 2);

    std::string malformed = write_config(dir, "{ not json");
    CHECK(cli::run({"riesz-min", "--config", malformed, "--out", dir.string()}) == 2);

    CHECK(cli::run({"riesz-min", "--config", (dir / "nope.json").string()}) == 2);

    // precondition violations on config values are config errors too
    std::string too_few = write_config(dir, R"({
        "command": "riesz-min",
        "region": {"kind": "box", "corner": [0], "side": 1.0},
        "n": 2, "s": 2.0, "k": 3
    })");
    CHECK(cli::run({"riesz-min", "--config", too_few, "--out", dir.string()}) == 2);
}

TEST_CASE("flag overrides win over the config") {
    fs::path dir = fresh_dir("flags");
    std::string cfg = write_config(dir, R"({
        "command": "riesz-min",
        "region": {"kind": "box", "corner": [0], "side": 1.0},
        "n": 8, "s": 2.0, "k": 1, "max_iters": 50
    })");
    REQUIRE(cli::run({"riesz-min", "--config", cfg, "--out", (dir / "o").string(), "--n",
                      "12"}) == 0);
    auto manifest = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
    CHECK(manifest["config"]["n"] == 12);
    auto csv = slurp(dir / "o" / "points.csv");
    CHECK(csv.substr(0, 13) == "# dim=1 n=12\n");
}

TEST_CASE("quantize command") {
    fs::path dir = fresh_dir("quant");
    std::string cfg = write_config(dir, R"({
        "command": "quantize",
        "region": {"kind": "box", "corner": [0], "side": 1.0},
        "n": 12, "p": 2.0,
        "quad": {"mode": "exact-1d"},
        "iters": 60, "seed": 2
    })");
    REQUIRE(cli::run({"quantize", "--config", cfg, "--out", (dir / "o").string()}) == 0);
    auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
    // converged toward the midpoint quantizer value 1/(12 N^2)
    double expect = 1.0 / (12.0 * 12 * 12);
    CHECK(report["energy"].get<double>() < 1.6 * expect);
    auto trace = slurp(dir / "o" / "trace.csv");
    CHECK(trace.substr(0, 12) == "iter,energy\n");
}

TEST_CASE("mesh-relax command") {
    fs::path dir = fresh_dir("mesh");
    std::string cfg = write_config(dir, R"({
        "command": "mesh-relax",
        "region": {"kind": "box", "dim": 2, "corner": [0, 0], "side": 1.0},
        "n": 48, "pressure": 0.2, "dt": 0.05, "iters": 60, "seed": 4, "emit_svg": true
    })");
    REQUIRE(cli::run({"mesh-relax", "--config", cfg, "--out", (dir / "o").string()}) == 0);
    CHECK(fs::exists(dir / "o" / "mesh.off"));
    auto off = slurp(dir / "o" / "mesh.off");
    CHECK(off.substr(0, 4) == "OFF\n");
}

TEST_CASE("sphere scatter is drawn in orthographic projection") {
    fs::path dir = fresh_dir("sphere");
    std::string cfg = write_config(dir, R"({
        "command": "riesz-min",
        "region": {"kind": "sphere-surface", "center": [0, 0, 0], "radius": 1.0},
        "n": 30, "s": 2.0, "k": 3, "seed": 2, "max_iters": 150, "emit_svg": true
    })");
    REQUIRE(cli::run({"riesz-min", "--config", cfg, "--out", (dir / "o").string()}) == 0);
    auto svg = slurp(dir / "o" / "scatter.svg");
    CHECK(svg.substr(0, 5) == "<?xml");
    CHECK(svg.find("</svg>") != std::string::npos);
    auto csv = slurp(dir / "o" / "points.csv");
    CHECK(csv.substr(0, 13) == "# dim=3 n=30\n");
}

TEST_CASE("estimate-constant command recovers the circle constant") {
    fs::path dir = fresh_dir("estc");
    std::string cfg = write_config(dir, R"({
        "command": "estimate-constant",
        "family": "riesz",
        "region": {"kind": "circle-periodic"},
        "s": 2.0, "k": 1,
        "n_grid": [16, 24, 32, 48],
        "restarts": 2, "max_iters": 4000, "seed": 5
    })");
    REQUIRE(cli::run({"estimate-constant", "--config", cfg, "--out", (dir / "o").string()}) == 0);
    auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
    CHECK(std::abs(report["f1_estimate"].get<double>() -
                   report["reference_constant"].get<double>()) < 0.05);
    CHECK(std::abs(report["exponent"].get<double>() - 3.0) < 0.05);
}

TEST_CASE("verify-density command") {
    fs::path dir = fresh_dir("verd");
    std::string cfg = write_config(dir, R"({
        "command": "verify-density",
        "family": "quantizer",
        "region": {"kind": "box", "corner": [0], "side": 1.0},
        "n": 80, "p": 2.0, "weight": "1+x0",
        "quad": {"mode": "grid", "samples": 16384},
        "iters": 800, "init": "uniform-spacing"
    })");
    REQUIRE(cli::run({"verify-density", "--config", cfg, "--out", (dir / "o").string()}) == 0);
    auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
    CHECK(report["divergence"].contains("ks"));
    CHECK(report["divergence"]["ks"].get<double>() < 0.06);
    CHECK(report["bins"].size() == 16);
}

TEST_CASE("split-probe command") {
    fs::path dir = fresh_dir("split");
    std::string cfg = write_config(dir, R"({
        "command": "split-probe",
        "family": "riesz",
        "region_a": {"kind": "box", "corner": [0], "side": 1.0},
        "region_b": {"kind": "box", "corner": [2], "side": 1.0},
        "s": 2.0, "k": 1,
        "n_grid": [32, 64], "restarts": 2, "max_iters": 3000, "seed": 6
    })");
    REQUIRE(cli::run({"split-probe", "--config", cfg, "--out", (dir / "o").string()}) == 0);
    auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
    for (double r : report["ratio"]) CHECK(std::abs(r - 1.0) < 0.05);
}
