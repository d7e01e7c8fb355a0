// bsim: configuration-driven front door for the buffersim library.
// Subcommands: simulate, sweep, bounds, verify. All randomness flows from
// the config's seed (or --seed); outputs are byte-reproducible.
//
// Exit codes: 0 success, 2 config error, 3 verification failure, 4 runtime
// error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "buffersim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;
constexpr int kExitRuntime = 4;

int exit_code(bsim_status status) {
    switch (status) {
        case BSIM_OK: return kExitOk;
        case BSIM_ERR_CONFIG: return kExitConfig;
        case BSIM_ERR_DOMAIN: return kExitConfig;
        case BSIM_ERR_VERIFY: return kExitVerify;
        default: return kExitRuntime;
    }
}

// Owning wrapper for strings handed out by the library.
struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { bsim_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

int fail(bsim_status status, const std::string& context) {
    std::cerr << "bsim: " << context << ": " << bsim_last_error() << "\n";
    return exit_code(status);
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << data;
    return static_cast<bool>(out);
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string formats = "csv,json";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
};

// Exits 2 through the caller when a format name is unknown.
std::optional<std::set<std::string>> parse_formats(const std::string& formats) {
    std::set<std::string> out;
    std::stringstream ss(formats);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item != "csv" && item != "json" && item != "svg") {
            std::cerr << "bsim: --format: unknown format '" << item
                      << "' (expected csv, json, svg)\n";
            return std::nullopt;
        }
        out.insert(item);
    }
    return out;
}

// Load the config document and apply a --seed override in-document, so the
// seed recorded in outputs is the one that actually ran.
int load_config(const CommonOpts& opts, std::string& out_text) {
    auto text = read_file(opts.config_path);
    if (!text) {
        std::cerr << "bsim: cannot read config file '" << opts.config_path << "'\n";
        return kExitConfig;
    }
    if (opts.seed) {
        json doc = json::parse(*text, nullptr, false);
        if (doc.is_discarded()) {
            std::cerr << "bsim: config: invalid JSON\n";
            return kExitConfig;
        }
        if (!doc.contains("run") || !doc["run"].is_object()) doc["run"] = json::object();
        doc["run"]["seed"] = *opts.seed;
        out_text = doc.dump();
    } else {
        out_text = *text;
    }
    return kExitOk;
}

int cmd_simulate(const CommonOpts& opts) {
    std::string text;
    if (int rc = load_config(opts, text); rc != kExitOk) return rc;
    auto parsed = parse_formats(opts.formats);
    if (!parsed) return kExitConfig;
    const auto& formats = *parsed;

    bsim_run* run = nullptr;
    if (auto st = bsim_run_new(text.c_str(), &run); st != BSIM_OK)
        return fail(st, "simulate");

    fs::create_directories(opts.out_dir);
    int rc = kExitOk;
    auto emit = [&](const char* name, bsim_status (*fn)(const bsim_run*, char**)) {
        OwnedString s;
        if (auto st = fn(run, &s.ptr); st != BSIM_OK) {
            rc = fail(st, name);
            return;
        }
        if (!write_file(fs::path(opts.out_dir) / name, s.str())) {
            std::cerr << "bsim: cannot write " << name << "\n";
            rc = kExitRuntime;
        }
    };
    if (formats.count("csv")) emit("trace.csv", bsim_run_csv);
    if (rc == kExitOk && formats.count("json")) emit("summary.json", bsim_run_summary_json);
    if (rc == kExitOk && formats.count("svg")) {
        emit("timeseries.svg", bsim_run_timeseries_svg);
        if (rc == kExitOk) emit("histogram.svg", bsim_run_histogram_svg);
    }
    bsim_run_free(run);
    return rc;
}

// Pull the headline metrics out of a point summary for the results table.
std::string sweep_table(const json& outcome) {
    std::ostringstream out;
    out << "parameter,value,ok,min_buffer,utilization_p1,utilization_p50,"
           "fairness_lo,fairness_hi\n";
    const std::string parameter = outcome["parameter"].get<std::string>();
    for (const auto& p : outcome["points"]) {
        out << parameter << ',' << p["value"].get<double>() << ','
            << (p["ok"].get<bool>() ? 1 : 0) << ',';
        if (p["ok"].get<bool>()) {
            const auto& s = p["summary"];
            if (s["min_buffer"].is_null()) out << "";
            else out << s["min_buffer"].get<double>();
            out << ',' << s["utilization"]["p1"].get<double>() << ','
                << s["utilization"]["p50"].get<double>() << ',';
            if (s["fairness"].is_null()) out << ",";
            else
                out << s["fairness"]["lo"].get<double>() << ','
                    << s["fairness"]["hi"].get<double>();
        } else {
            out << ",,,,";
        }
        out << '\n';
    }
    return out.str();
}

int cmd_sweep(const CommonOpts& opts) {
    std::string text;
    if (int rc = load_config(opts, text); rc != kExitOk) return rc;
    auto parsed = parse_formats(opts.formats);
    if (!parsed) return kExitConfig;
    const auto& formats = *parsed;

    OwnedString result;
    auto st = bsim_sweep(text.c_str(), opts.jobs, &result.ptr);
    if (st != BSIM_OK && result.ptr == nullptr) return fail(st, "sweep");

    fs::create_directories(opts.out_dir);
    json outcome = json::parse(result.str());
    int rc = st == BSIM_OK ? kExitOk : kExitRuntime;
    if (formats.count("json") &&
        !write_file(fs::path(opts.out_dir) / "sweep.json", result.str())) {
        std::cerr << "bsim: cannot write sweep.json\n";
        rc = kExitRuntime;
    }
    if (formats.count("csv") &&
        !write_file(fs::path(opts.out_dir) / "sweep.csv", sweep_table(outcome))) {
        std::cerr << "bsim: cannot write sweep.csv\n";
        rc = kExitRuntime;
    }
    if (st != BSIM_OK)
        std::cerr << "bsim: sweep: " << bsim_last_error() << " (partial results written)\n";
    return rc;
}

int cmd_verify(const CommonOpts& opts, bool default_suite) {
    std::string text;
    const char* config = nullptr;
    if (!default_suite) {
        if (int rc = load_config(opts, text); rc != kExitOk) return rc;
        config = text.c_str();
    }
    OwnedString result;
    auto st = bsim_verify(config, opts.seed.value_or(1), &result.ptr);
    if (result.ptr == nullptr) return fail(st, "verify");

    json outcome = json::parse(result.str());
    for (const auto& check : outcome["checks"]) {
        const bool pass = check["pass"].get<bool>();
        std::cout << (pass ? "PASS " : "FAIL ") << check["id"].get<std::string>()
                  << ": " << check["detail"].get<std::string>() << "\n";
    }
    std::cout << (outcome["all_pass"].get<bool>() ? "all checks passed"
                                                  : "verification failed")
              << "\n";
    if (!opts.out_dir.empty() && opts.out_dir != ".") {
        fs::create_directories(opts.out_dir);
        write_file(fs::path(opts.out_dir) / "verify.json", result.str());
    }
    return st == BSIM_OK ? kExitOk : exit_code(st);
}

int cmd_bounds(const std::string& formula, const json& inputs) {
    OwnedString out;
    auto st = bsim_bounds_eval(formula.c_str(), inputs.dump().c_str(), &out.ptr);
    if (st != BSIM_OK) return fail(st, "bounds " + formula);
    std::cout << out.str() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"buffer-sizing simulator and bound calculator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("bsim ") + bsim_version());

    CommonOpts opts;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* c = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
        if (config_required) c->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--format", opts.formats, "comma-separated: csv,json,svg");
        cmd->add_option("--seed", opts.seed, "override the config seed");
        cmd->add_option("--jobs", opts.jobs, "parallel workers for sweep points");
    };

    auto* simulate = app.add_subcommand("simulate", "run one experiment, write trace + summary");
    add_common(simulate, true);

    auto* sweep = app.add_subcommand("sweep", "run the config's parameter sweep");
    add_common(sweep, true);

    auto* verify = app.add_subcommand("verify", "check theorem conclusions against runs");
    add_common(verify, false);

    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate one closed-form bound");
    std::string formula;
    json inputs = json::object();
    bounds_cmd->add_option("formula", formula,
                           "single|sqrt_n|util_floor|bbr|desync|min_dec|bern_tail|"
                           "rand_loss|thm2_floor")
        ->required();
    auto add_num = [&](const char* flag, const char* key) {
        bounds_cmd->add_option_function<double>(
            flag, [&inputs, key](const double& v) { inputs[key] = v; });
    };
    bounds_cmd->add_option_function<std::string>(
        "--algo", [&inputs](const std::string& v) { inputs["algo"] = v; },
        "reno|md|cubic|scalable|bbr_cycle");
    add_num("--beta", "beta");
    add_num("--bdp", "bdp");
    add_num("--gamma", "gamma");
    add_num("--n", "n");
    add_num("--delta-lo", "delta_lo");
    add_num("--delta-hi", "delta_hi");
    add_num("--delta", "delta");
    add_num("--buffer", "buffer");
    add_num("--s", "s");
    add_num("--w-min", "w_min");
    add_num("--p", "p");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;  // usage errors are config errors
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (verify->parsed()) return cmd_verify(opts, opts.config_path.empty());
        if (bounds_cmd->parsed()) return cmd_bounds(formula, inputs);
    } catch (const std::exception& e) {
        std::cerr << "bsim: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
