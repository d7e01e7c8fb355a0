// Exercises the shared-library C surface only (buffersim.h), the same way
// the CLI and other language bindings consume it.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "buffersim.h"

using nlohmann::json;

namespace {

const char* kConfig = R"({
  "link": {"bdp": 100, "buffer": 100},
  "flows": {"count": 1, "algorithm": "reno"},
  "sync": {"model": "full_sync"},
  "run": {"duration": 400, "seed": 21, "record_per_flow": true}
})";

struct Str {
    char* ptr = nullptr;
    ~Str() { bsim_string_free(ptr); }
    std::string get() const { return ptr ? ptr : ""; }
};

}  // namespace

TEST_CASE("version and error plumbing") {
    CHECK(std::strlen(bsim_version()) > 0);
    Str out;
    CHECK(bsim_bounds_eval("no_such_formula", "{}", &out.ptr) == BSIM_ERR_DOMAIN);
    CHECK(std::string(bsim_last_error()).find("no_such_formula") != std::string::npos);
}

TEST_CASE("bounds evaluation") {
    Str out;
    REQUIRE(bsim_bounds_eval("sqrt_n", R"({"delta_hi":2,"bdp":1000,"n":100})",
                             &out.ptr) == BSIM_OK);
    auto doc = json::parse(out.get());
    CHECK(doc["value"].get<double>() == doctest::Approx(200.0));
    CHECK(doc["formula"] == "sqrt_n");
    CHECK(doc["inputs"]["n"] == 100);

    Str cubic;
    REQUIRE(bsim_bounds_eval("single", R"({"algo":"cubic","bdp":700,"gamma":1})",
                             &cubic.ptr) == BSIM_OK);
    CHECK(json::parse(cubic.get())["value"].get<double>() == doctest::Approx(300.0));

    Str bad;
    CHECK(bsim_bounds_eval("bbr", R"({"delta_hi":1,"bdp":100,"n":50,"delta":0})",
                           &bad.ptr) == BSIM_ERR_DOMAIN);
}

TEST_CASE("run lifecycle and accessors") {
    bsim_run* run = nullptr;
    REQUIRE(bsim_run_new(kConfig, &run) == BSIM_OK);
    CHECK(bsim_run_slot_count(run) == 400);
    CHECK(bsim_run_flow_count(run) == 1);

    bsim_slot slot{};
    REQUIRE(bsim_run_slot(run, 0, &slot) == BSIM_OK);
    CHECK(slot.aggregate_window == 200.0);
    CHECK(slot.loss_event == 1);
    REQUIRE(bsim_run_slot(run, 1, &slot) == BSIM_OK);
    CHECK(slot.aggregate_window == 100.0);
    CHECK(slot.utilization == 1.0);
    CHECK(bsim_run_slot(run, 400, &slot) == BSIM_ERR_DOMAIN);

    double w = 0;
    REQUIRE(bsim_run_window(run, 1, 0, &w) == BSIM_OK);
    CHECK(w == 100.0);

    Str csv;
    REQUIRE(bsim_run_csv(run, &csv.ptr) == BSIM_OK);
    CHECK(csv.get().rfind("slot,W,Q,mu,loss,n_decreasing,w_0\n", 0) == 0);

    Str summary;
    REQUIRE(bsim_run_summary_json(run, &summary.ptr) == BSIM_OK);
    auto doc = json::parse(summary.get());
    CHECK(doc["utilization"]["p1"].get<double>() == 1.0);
    CHECK(doc["config"]["run"]["seed"] == 21);

    Str svg;
    REQUIRE(bsim_run_timeseries_svg(run, &svg.ptr) == BSIM_OK);
    CHECK(svg.get().rfind("<svg", 0) == 0);
    Str hsvg;
    REQUIRE(bsim_run_histogram_svg(run, &hsvg.ptr) == BSIM_OK);
    CHECK(hsvg.get().find("</svg>") != std::string::npos);

    bsim_run_free(run);
}

TEST_CASE("config errors name the field") {
    bsim_run* run = nullptr;
    std::string bad = kConfig;
    bad.replace(bad.find("reno"), 4, "vega");
    CHECK(bsim_run_new(bad.c_str(), &run) == BSIM_ERR_CONFIG);
    CHECK(std::string(bsim_last_error()).find("flows.algorithm") != std::string::npos);
}

TEST_CASE("search through the C surface") {
    Str out;
    const char* cfg = R"({
      "link": {"bdp": 1000, "buffer": 0},
      "flows": {"count": 1, "algorithm": "bbr_cycle"},
      "sync": {"model": "full_sync"},
      "run": {"duration": 2000, "seed": 3}
    })";
    REQUIRE(bsim_search_min_buffer(cfg, 1.0, 1.0, &out.ptr) == BSIM_OK);
    auto doc = json::parse(out.get());
    CHECK(doc["satisfiable"].get<bool>());
    CHECK(doc["buffer"].get<double>() == doctest::Approx(250.0).epsilon(0.01));
}

TEST_CASE("monte carlo through the C surface") {
    Str out;
    REQUIRE(bsim_monte_carlo("lemma6",
                             R"({"n":100,"bdp":100,"delta_lo":1,"delta_hi":1})",
                             10000, 7, &out.ptr) == BSIM_OK);
    auto doc = json::parse(out.get());
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["threshold"].get<double>() == doctest::Approx(110.0));
}

TEST_CASE("sweep and determinism through the C surface") {
    const char* cfg = R"({
      "link": {"bdp": 200, "buffer": 100},
      "flows": {"count": 4, "algorithm": "reno"},
      "sync": {"model": "sqrt_extra"},
      "run": {"duration": 60, "seed": 5},
      "sweep": {"parameter": "link.buffer", "values": [50, 150]}
    })";
    Str a, b;
    REQUIRE(bsim_sweep(cfg, 1, &a.ptr) == BSIM_OK);
    REQUIRE(bsim_sweep(cfg, 2, &b.ptr) == BSIM_OK);
    CHECK(a.get() == b.get());
    auto doc = json::parse(a.get());
    CHECK(doc["points"].size() == 2);
    CHECK(doc["all_ok"].get<bool>());
}

TEST_CASE("default verify suite through the C surface") {
    Str out;
    CHECK(bsim_verify(nullptr, 1, &out.ptr) == BSIM_OK);
    auto doc = json::parse(out.get());
    CHECK(doc["all_pass"].get<bool>());
    CHECK(doc["checks"].size() == 6);
}
