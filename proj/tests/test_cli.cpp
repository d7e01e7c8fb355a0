// Integration tests driving the bsim binary as a subprocess: subcommands,
// exit codes, file outputs, and byte-level reproducibility.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef BSIM_BINARY
#error "BSIM_BINARY must point at the CLI executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    std::string cmd = std::string(BSIM_BINARY) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    CommandResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("bsim_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    auto path = dir / "config.json";
    std::ofstream out(path);
    out << doc.dump(2);
    return path;
}

json minimal_config() {
    return json::parse(R"({
      "link": {"bdp": 100, "buffer": 100},
      "flows": {"count": 1, "algorithm": "reno"},
      "sync": {"model": "full_sync"},
      "run": {"duration": 1000, "seed": 77}
    })");
}

}  // namespace

TEST_CASE("simulate writes trace and summary") {
    auto dir = temp_dir("simulate");
    auto cfg = write_config(dir, minimal_config());
    auto res = run_cli("simulate --config " + cfg.string() + " --out " +
                       (dir / "out").string());
    CHECK(res.exit_code == 0);

    auto csv = slurp(dir / "out" / "trace.csv");
    CHECK(csv.rfind("slot,W,Q,mu,loss,n_decreasing\n", 0) == 0);
    // 1000 data rows + header.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1001);

    auto summary = json::parse(slurp(dir / "out" / "summary.json"));
    CHECK(summary["config"]["run"]["seed"] == 77);
    CHECK(summary["utilization"]["p1"].get<double>() == 1.0);
}

TEST_CASE("identical configs give byte-identical outputs") {
    auto dir = temp_dir("determinism");
    auto doc = minimal_config();
    doc["flows"] = {{"count", 16}, {"algorithm", "randomized_reno"}};
    doc["sync"] = {{"model", "sqrt_extra"}};
    doc["run"]["record_per_flow"] = true;
    auto cfg = write_config(dir, doc);

    auto res1 = run_cli("simulate --config " + cfg.string() + " --format csv,json,svg --out " +
                        (dir / "a").string());
    auto res2 = run_cli("simulate --config " + cfg.string() + " --format csv,json,svg --out " +
                        (dir / "b").string());
    CHECK(res1.exit_code == 0);
    CHECK(res2.exit_code == 0);
    for (const char* name : {"trace.csv", "summary.json", "timeseries.svg", "histogram.svg"})
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
}

TEST_CASE("seed override changes outputs and is stamped in the summary") {
    auto dir = temp_dir("seed");
    auto doc = minimal_config();
    doc["flows"]["count"] = 8;
    doc["sync"]["model"] = "sqrt_extra";
    auto cfg = write_config(dir, doc);
    run_cli("simulate --config " + cfg.string() + " --seed 123 --out " + (dir / "a").string());
    auto summary = json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(summary["config"]["run"]["seed"] == 123);
}

TEST_CASE("config errors exit 2 naming the field") {
    auto dir = temp_dir("badcfg");
    auto doc = minimal_config();
    doc["flows"]["algorithm"] = "definitely_not_tcp";
    auto cfg = write_config(dir, doc);
    auto res = run_cli("simulate --config " + cfg.string() + " --out " + dir.string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("flows.algorithm") != std::string::npos);
}

TEST_CASE("sweep produces a sorted table and per-point summaries") {
    auto dir = temp_dir("sweep");
    auto doc = minimal_config();
    doc["flows"] = {{"count", 4}, {"algorithm", "reno"}};
    doc["sync"] = {{"model", "sqrt_extra"}};
    doc["run"]["duration"] = 200;
    doc["sweep"] = {{"parameter", "flows.count"}, {"values", {16, 4, 8}}};
    auto cfg = write_config(dir, doc);
    auto res = run_cli("sweep --config " + cfg.string() + " --out " + (dir / "out").string());
    CHECK(res.exit_code == 0);

    auto table = slurp(dir / "out" / "sweep.csv");
    CHECK(table.rfind("parameter,value,ok,", 0) == 0);
    auto p4 = table.find("flows.count,4,");
    auto p8 = table.find("flows.count,8,");
    auto p16 = table.find("flows.count,16,");
    CHECK(p4 != std::string::npos);
    CHECK(p4 < p8);
    CHECK(p8 < p16);

    auto points = json::parse(slurp(dir / "out" / "sweep.json"));
    CHECK(points["points"].size() == 3);

    SUBCASE("empty value list exits 2") {
        doc["sweep"]["values"] = json::array();
        auto bad = write_config(dir, doc);
        auto res2 = run_cli("sweep --config " + bad.string() + " --out " + dir.string());
        CHECK(res2.exit_code == 2);
        CHECK(res2.output.find("sweep.values") != std::string::npos);
    }

    SUBCASE("a failing point leaves partial results and a nonzero exit") {
        doc["sync"] = {{"model", "bernoulli"}, {"p", 0.5}};
        doc["sweep"] = {{"parameter", "sync.p"}, {"values", {0.5, 2.0}}};
        auto bad = write_config(dir, doc);
        auto res2 = run_cli("sweep --config " + bad.string() + " --out " +
                            (dir / "partial").string());
        CHECK(res2.exit_code == 4);
        auto points = json::parse(slurp(dir / "partial" / "sweep.json"));
        REQUIRE(points["points"].size() == 2);
        CHECK(points["points"][0]["ok"].get<bool>());
        CHECK_FALSE(points["points"][1]["ok"].get<bool>());
        CHECK(points["points"][1]["error"].get<std::string>().find("p") !=
              std::string::npos);
    }
}

TEST_CASE("sweep with a search section reports min_buffer per point") {
    auto dir = temp_dir("sweepsearch");
    auto doc = minimal_config();
    doc["run"]["duration"] = 400;
    doc["sweep"] = {{"parameter", "flows.count"}, {"values", {1}}};
    doc["search"] = {{"target", 1.0}, {"tolerance", 2.0}};
    auto cfg = write_config(dir, doc);
    auto res = run_cli("sweep --config " + cfg.string() + " --out " + (dir / "out").string());
    CHECK(res.exit_code == 0);
    auto points = json::parse(slurp(dir / "out" / "sweep.json"));
    auto min_buffer = points["points"][0]["summary"]["min_buffer"];
    REQUIRE(!min_buffer.is_null());
    // Single reno flow on a bdp-100 link: full utilization needs one bdp.
    CHECK(min_buffer.get<double>() == doctest::Approx(100.0).epsilon(0.03));
}

TEST_CASE("bounds subcommand prints one json line") {
    auto res = run_cli("bounds sqrt-n --delta-hi 2 --bdp 1000 --n 100");
    CHECK(res.exit_code == 0);
    auto doc = json::parse(res.output);
    CHECK(doc["value"].get<double>() == doctest::Approx(200.0));

    auto cubic = run_cli("bounds single --algo cubic --bdp 1000 --gamma 1");
    CHECK(json::parse(cubic.output)["value"].get<double>() ==
          doctest::Approx(3.0 / 7.0 * 1000.0));

    SUBCASE("domain error exits 2 with the precondition") {
        auto bad = run_cli("bounds bbr --delta-hi 1 --bdp 100 --n 50 --delta 0");
        CHECK(bad.exit_code == 2);
        CHECK(bad.output.find("delta") != std::string::npos);
    }
}

TEST_CASE("verify default suite passes and prints per-check lines") {
    auto res = run_cli("verify");
    CHECK(res.exit_code == 0);
    for (const char* id : {"theorem2", "theorem3", "theorem4", "theorem5", "lemma6",
                           "appendix_c"})
        CHECK(res.output.find(std::string("PASS ") + id) != std::string::npos);
    CHECK(res.output.find("all checks passed") != std::string::npos);
}

TEST_CASE("unknown output format exits 2") {
    auto dir = temp_dir("badformat");
    auto cfg = write_config(dir, minimal_config());
    auto res = run_cli("simulate --config " + cfg.string() + " --format csv,png --out " +
                       dir.string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("png") != std::string::npos);
}

TEST_CASE("verify stays green across seeds and writes its report") {
    auto dir = temp_dir("verifyseed");
    for (const char* seed : {"7", "8"}) {
        auto res = run_cli(std::string("verify --seed ") + seed + " --out " +
                           (dir / seed).string());
        CHECK(res.exit_code == 0);
        auto report = json::parse(slurp(dir / seed / "verify.json"));
        CHECK(report["all_pass"].get<bool>());
    }
}

TEST_CASE("verify reports premises-never-held as exit 3") {
    auto dir = temp_dir("verify3");
    auto doc = json::parse(R"({
      "link": {"bdp": 1000, "buffer": 250},
      "flows": {"count": 64, "algorithm": "reno"},
      "sync": {"model": "full_sync"},
      "run": {"duration": 800, "seed": 2, "theorem_mode": true},
      "band": {"delta_lo": 0.9, "delta_hi": 2.0},
      "verify": {"theorems": ["theorem2"], "seeds": 2}
    })");
    auto cfg = write_config(dir, doc);
    auto res = run_cli("verify --config " + cfg.string());
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("premises never held") != std::string::npos);
}
