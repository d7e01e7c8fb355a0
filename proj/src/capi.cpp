// C facade over the C++ core. Exceptions are caught at the boundary and
// mapped to status codes; messages go to a thread-local buffer.

#include "buffersim.h"

#include <cstring>
#include <new>
#include <string>

#include "analysis.hpp"
#include "config.hpp"
#include "experiment.hpp"
#include "svgplot.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
bsim_status guard(Fn&& fn) {
    try {
        g_error.clear();
        return fn();
    } catch (const bufsim::config::ConfigError& e) {
        g_error = e.what();
        return BSIM_ERR_CONFIG;
    } catch (const std::domain_error& e) {
        g_error = e.what();
        return BSIM_ERR_DOMAIN;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return BSIM_ERR_DOMAIN;
    } catch (const std::exception& e) {
        g_error = e.what();
        return BSIM_ERR_RUNTIME;
    }
}

double need(const json& inputs, const char* key) {
    if (!inputs.contains(key) || !inputs[key].is_number())
        throw std::domain_error(std::string("missing numeric input '") + key + "'");
    return inputs[key].get<double>();
}

double need_or(const json& inputs, const char* key, double fallback) {
    if (!inputs.contains(key)) return fallback;
    if (!inputs[key].is_number())
        throw std::domain_error(std::string("expected numeric input '") + key + "'");
    return inputs[key].get<double>();
}

bufsim::bounds::FairnessBand band_from(const json& inputs, double lo_default = 1.0,
                                       double hi_default = 1.0) {
    bufsim::bounds::FairnessBand band;
    band.delta_lo = need_or(inputs, "delta_lo", lo_default);
    band.delta_hi = need_or(inputs, "delta_hi", hi_default);
    if (!inputs.contains("delta_lo") && inputs.contains("delta_hi"))
        band.delta_lo = std::min(band.delta_lo, band.delta_hi);
    band.validate();
    return band;
}

bufsim::cc::AlgorithmKind algo_from(const json& inputs) {
    if (!inputs.contains("algo") || !inputs["algo"].is_string())
        throw std::domain_error("missing string input 'algo'");
    std::string name = inputs["algo"].get<std::string>();
    if (name == "reno") return bufsim::cc::AlgorithmKind::reno();
    if (name == "cubic") return bufsim::cc::AlgorithmKind::cubic();
    if (name == "scalable") return bufsim::cc::AlgorithmKind::scalable();
    if (name == "bbr_cycle") return bufsim::cc::AlgorithmKind::bbr_cycle();
    if (name == "md") return bufsim::cc::AlgorithmKind::md(need(inputs, "beta"));
    throw std::domain_error("unknown algorithm '" + name +
                            "' (expected reno, md, cubic, scalable, bbr_cycle)");
}

json eval_formula(std::string formula, const json& inputs) {
    namespace bounds = bufsim::bounds;
    for (auto& c : formula)
        if (c == '-') c = '_';
    json out = {{"formula", formula}, {"inputs", inputs}};
    if (formula == "single") {
        out["value"] = bounds::single_flow_min_buffer(
            algo_from(inputs), need(inputs, "bdp"), need_or(inputs, "gamma", 1.0));
    } else if (formula == "sqrt_n") {
        out["value"] = bounds::sqrt_n_buffer(band_from(inputs), need(inputs, "bdp"),
                                             need(inputs, "n"));
    } else if (formula == "util_floor") {
        out["value"] = bounds::utilization_floor(band_from(inputs), need(inputs, "n"));
    } else if (formula == "bbr") {
        out["value"] = bounds::bbr_buffer(band_from(inputs), need(inputs, "bdp"),
                                          need(inputs, "n"), need(inputs, "delta"));
    } else if (formula == "desync") {
        out["value"] = bounds::desync_window_floor(
            band_from(inputs), need(inputs, "bdp"), need(inputs, "buffer"),
            need(inputs, "n"), need(inputs, "s"));
    } else if (formula == "min_dec") {
        out["value"] =
            bounds::min_decreasing_flows(need(inputs, "n"), need(inputs, "w_min"));
    } else if (formula == "bern_tail") {
        if (inputs.contains("delta")) {
            out["value"] = bounds::bernoulli_sync_threshold(
                band_from(inputs), need(inputs, "bdp"), need(inputs, "n"),
                need(inputs, "delta"));
            out["probability_bound"] = need(inputs, "delta");
        } else {
            auto tail = bounds::bernoulli_sync_tail(band_from(inputs),
                                                    need(inputs, "bdp"),
                                                    need(inputs, "n"));
            out["value"] = tail.threshold;
            out["probability_bound"] = tail.probability;
        }
    } else if (formula == "rand_loss") {
        out["value"] = bounds::random_loss_buffer(
            band_from(inputs), need(inputs, "bdp"), need(inputs, "p"),
            need(inputs, "n"), need(inputs, "delta"));
    } else if (formula == "thm2_floor") {
        auto floor = bounds::theorem2_window_floor(
            band_from(inputs), need(inputs, "bdp"), need(inputs, "buffer"),
            need(inputs, "n"));
        out["value"] = floor.floor;
        out["premise_cap"] = floor.premise_cap;
    } else {
        throw std::domain_error("unknown formula '" + formula +
                                "' (expected single, sqrt_n, util_floor, bbr, desync, "
                                "min_dec, bern_tail, rand_loss, thm2_floor)");
    }
    return out;
}

}  // namespace

struct bsim_run {
    bufsim::sim::Trace trace;
};

extern "C" {

const char* bsim_version(void) { return bufsim::experiment::kToolVersion; }

const char* bsim_last_error(void) { return g_error.c_str(); }

void bsim_string_free(char* s) { delete[] s; }

bsim_status bsim_bounds_eval(const char* formula, const char* inputs_json,
                             char** out_json) {
    return guard([&]() -> bsim_status {
        if (!formula || !inputs_json || !out_json)
            throw std::invalid_argument("null argument");
        json inputs = json::parse(inputs_json, nullptr, false);
        if (inputs.is_discarded() || !inputs.is_object())
            throw std::domain_error("inputs must be a JSON object");
        *out_json = dup_string(eval_formula(formula, inputs).dump());
        return BSIM_OK;
    });
}

bsim_status bsim_run_new(const char* config_json, bsim_run** out) {
    return guard([&]() -> bsim_status {
        if (!config_json || !out) throw std::invalid_argument("null argument");
        auto exp = bufsim::config::parse_experiment_text(config_json);
        auto* run = new bsim_run{bufsim::sim::run(exp.sim)};
        *out = run;
        return BSIM_OK;
    });
}

void bsim_run_free(bsim_run* run) { delete run; }

uint64_t bsim_run_slot_count(const bsim_run* run) {
    return run ? run->trace.slots.size() : 0;
}

uint64_t bsim_run_flow_count(const bsim_run* run) {
    return run ? run->trace.config.n_flows : 0;
}

bsim_status bsim_run_slot(const bsim_run* run, uint64_t index, bsim_slot* out) {
    return guard([&]() -> bsim_status {
        if (!run || !out) throw std::invalid_argument("null argument");
        if (index >= run->trace.slots.size())
            throw std::invalid_argument("slot index out of range");
        const auto& s = run->trace.slots[index];
        out->slot = s.slot;
        out->aggregate_window = s.aggregate_window;
        out->queue = s.queue;
        out->utilization = s.utilization;
        out->loss_event = s.loss_event ? 1 : 0;
        out->n_decreasing = s.decreasing_flows.size();
        return BSIM_OK;
    });
}

bsim_status bsim_run_window(const bsim_run* run, uint64_t slot, uint64_t flow,
                            double* out) {
    return guard([&]() -> bsim_status {
        if (!run || !out) throw std::invalid_argument("null argument");
        if (slot >= run->trace.slots.size())
            throw std::invalid_argument("slot index out of range");
        const auto& windows = run->trace.slots[slot].per_flow_windows;
        if (windows.empty())
            throw std::invalid_argument("run did not record per-flow windows");
        if (flow >= windows.size())
            throw std::invalid_argument("flow index out of range");
        *out = windows[flow];
        return BSIM_OK;
    });
}

bsim_status bsim_run_csv(const bsim_run* run, char** out) {
    return guard([&]() -> bsim_status {
        if (!run || !out) throw std::invalid_argument("null argument");
        *out = dup_string(bufsim::sim::to_csv(run->trace));
        return BSIM_OK;
    });
}

bsim_status bsim_run_summary_json(const bsim_run* run, char** out) {
    return guard([&]() -> bsim_status {
        if (!run || !out) throw std::invalid_argument("null argument");
        // Theorem-mode runs with per-flow data get their window-floor and
        // utilization-floor checks embedded in the summary.
        std::vector<bufsim::analysis::VerificationReport> reports;
        const auto& trace = run->trace;
        if (trace.config.theorem_mode && trace.config.fairness_clamp &&
            trace.has_per_flow()) {
            for (auto id : {bufsim::analysis::TheoremId::Theorem2,
                            bufsim::analysis::TheoremId::Theorem3,
                            bufsim::analysis::TheoremId::Theorem4})
                reports.push_back(bufsim::analysis::verify_theorem(
                    trace, id, *trace.config.fairness_clamp));
        }
        *out = dup_string(bufsim::experiment::summarize(trace, reports).dump(2));
        return BSIM_OK;
    });
}

bsim_status bsim_run_timeseries_svg(const bsim_run* run, char** out) {
    return guard([&]() -> bsim_status {
        if (!run || !out) throw std::invalid_argument("null argument");
        *out = dup_string(bufsim::svgplot::timeseries(run->trace));
        return BSIM_OK;
    });
}

bsim_status bsim_run_histogram_svg(const bsim_run* run, char** out) {
    return guard([&]() -> bsim_status {
        if (!run || !out) throw std::invalid_argument("null argument");
        std::optional<bufsim::bounds::FairnessBand> band;
        if (run->trace.has_per_flow())
            band = bufsim::analysis::measure_fairness(run->trace);
        else if (run->trace.config.fairness_clamp)
            band = run->trace.config.fairness_clamp;
        auto hist = bufsim::analysis::queue_histogram(run->trace, 20, band);
        *out = dup_string(bufsim::svgplot::histogram(hist));
        return BSIM_OK;
    });
}

bsim_status bsim_search_min_buffer(const char* config_json, double target,
                                   double tolerance, char** out_json) {
    return guard([&]() -> bsim_status {
        if (!config_json || !out_json) throw std::invalid_argument("null argument");
        auto exp = bufsim::config::parse_experiment_text(config_json);
        std::uint64_t window = 1;
        double percentile = 0.0;
        if (exp.search) {
            window = exp.search->window;
            percentile = exp.search->percentile;
        }
        auto result = bufsim::analysis::search_min_buffer(exp.sim, target, tolerance,
                                                          window, percentile);
        json out = {{"satisfiable", result.satisfiable},
                    {"buffer", result.buffer},
                    {"bracket_lo", result.bracket_lo},
                    {"bracket_hi", result.bracket_hi},
                    {"monotone", result.monotone}};
        *out_json = dup_string(out.dump());
        return BSIM_OK;
    });
}

bsim_status bsim_sweep(const char* config_json, unsigned jobs, char** out_json) {
    return guard([&]() -> bsim_status {
        if (!config_json || !out_json) throw std::invalid_argument("null argument");
        json doc = json::parse(config_json, nullptr, false);
        if (doc.is_discarded())
            throw bufsim::config::ConfigError("config", "invalid JSON");
        auto exp = bufsim::config::parse_experiment(doc);
        if (!exp.sweep)
            throw bufsim::config::ConfigError("sweep", "missing sweep section");
        auto outcome = bufsim::experiment::run_sweep(doc, exp, jobs);
        json points = json::array();
        for (const auto& p : outcome.points)
            points.push_back(json{{"value", p.value},
                                  {"ok", p.ok},
                                  {"error", p.error},
                                  {"summary", p.summary}});
        json out = {{"parameter", outcome.parameter},
                    {"all_ok", outcome.all_ok},
                    {"points", points}};
        *out_json = dup_string(out.dump(2));
        if (!outcome.all_ok) {
            g_error = "one or more sweep points failed";
            return BSIM_ERR_RUNTIME;
        }
        return BSIM_OK;
    });
}

bsim_status bsim_verify(const char* config_json, uint64_t seed, char** out_json) {
    return guard([&]() -> bsim_status {
        if (!out_json) throw std::invalid_argument("null argument");
        bufsim::experiment::VerifyOutcome outcome;
        if (config_json == nullptr) {
            outcome = bufsim::experiment::verify_default_suite(seed);
        } else {
            auto exp = bufsim::config::parse_experiment_text(config_json);
            if (!exp.verify)
                throw bufsim::config::ConfigError("verify", "missing verify section");
            outcome = bufsim::experiment::verify_with_config(exp);
        }
        *out_json = dup_string(bufsim::experiment::verify_json(outcome).dump(2));
        if (!outcome.all_pass) {
            g_error = "verification failed";
            return BSIM_ERR_VERIFY;
        }
        return BSIM_OK;
    });
}

bsim_status bsim_monte_carlo(const char* check, const char* params_json,
                             uint64_t trials, uint64_t seed, char** out_json) {
    return guard([&]() -> bsim_status {
        if (!check || !params_json || !out_json)
            throw std::invalid_argument("null argument");
        json inputs = json::parse(params_json, nullptr, false);
        if (inputs.is_discarded() || !inputs.is_object())
            throw std::domain_error("params must be a JSON object");
        bufsim::analysis::MonteCarloParams params;
        params.n = need(inputs, "n");
        params.bdp = need(inputs, "bdp");
        params.band = band_from(inputs);
        params.delta = need_or(inputs, "delta", 0.05);
        if (inputs.contains("p")) params.p = need(inputs, "p");
        bufsim::analysis::MonteCarloCheck kind;
        std::string name = check;
        if (name == "theorem5") kind = bufsim::analysis::MonteCarloCheck::Theorem5;
        else if (name == "lemma6") kind = bufsim::analysis::MonteCarloCheck::Lemma6;
        else throw std::domain_error("unknown check '" + name + "'");
        auto result = bufsim::analysis::monte_carlo_bound(kind, params, trials, seed);
        *out_json = dup_string(bufsim::experiment::monte_carlo_json(result).dump());
        return BSIM_OK;
    });
}

}  // extern "C"
