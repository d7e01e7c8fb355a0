#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bufsim::config {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown_keys(const json& j, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(path + "." + it.key(), "unknown field");
}

double get_number(const json& j, const std::string& path, const char* key,
                  std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(path + "." + key, "missing required number");
    }
    if (!j[key].is_number())
        throw ConfigError(path + "." + key, "expected a number");
    return j[key].get<double>();
}

std::uint64_t get_count(const json& j, const std::string& path, const char* key,
                        std::optional<std::uint64_t> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(path + "." + key, "missing required integer");
    }
    if (!j[key].is_number_unsigned() && !j[key].is_number_integer())
        throw ConfigError(path + "." + key, "expected a non-negative integer");
    auto v = j[key].get<std::int64_t>();
    if (v < 0) throw ConfigError(path + "." + key, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

bool get_bool(const json& j, const std::string& path, const char* key,
              bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
    return j[key].get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing required string");
    if (!j[key].is_string()) throw ConfigError(path + "." + key, "expected a string");
    return j[key].get<std::string>();
}

cc::AlgorithmKind parse_algorithm(const json& flows, const std::string& path) {
    std::string name = get_string(flows, path, "algorithm");
    if (name == "reno") return cc::AlgorithmKind::reno();
    if (name == "cubic") return cc::AlgorithmKind::cubic();
    if (name == "scalable") return cc::AlgorithmKind::scalable();
    if (name == "bbr_cycle") return cc::AlgorithmKind::bbr_cycle();
    if (name == "bbr_increment") return cc::AlgorithmKind::bbr_increment();
    if (name == "randomized_reno") return cc::AlgorithmKind::randomized_reno();
    if (name == "md") {
        double beta = get_number(flows, path, "beta");
        if (!(beta > 0 && beta < 1))
            throw ConfigError(path + ".beta", "beta must be in (0, 1)");
        return cc::AlgorithmKind::md(beta);
    }
    throw ConfigError(path + ".algorithm",
                      "unknown algorithm '" + name +
                          "' (expected reno, md, cubic, scalable, bbr_cycle, "
                          "bbr_increment, or randomized_reno)");
}

sim::SyncModel parse_sync(const json& sync, const std::string& path) {
    std::string name = get_string(sync, path, "model");
    try {
        if (name == "minimal") return sim::SyncModel::minimal();
        if (name == "sqrt_extra") return sim::SyncModel::sqrt_extra();
        if (name == "full_sync") return sim::SyncModel::fully_synchronized();
        if (name == "bernoulli")
            return sim::SyncModel::bernoulli(get_number(sync, path, "p"));
        if (name == "largest_first")
            return sim::SyncModel::largest_first(get_count(sync, path, "k"));
        if (name == "ecn_threshold")
            return sim::SyncModel::ecn_threshold(
                get_number(sync, path, "threshold"),
                get_number(sync, path, "mark_fraction", 1.0));
    } catch (const std::domain_error& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".model",
                      "unknown sync model '" + name +
                          "' (expected minimal, sqrt_extra, full_sync, bernoulli, "
                          "largest_first, or ecn_threshold)");
}

}  // namespace

sim::SimConfig parse_sim_config(const json& doc) {
    require_object(doc, "config");
    sim::SimConfig cfg;

    if (!doc.contains("link")) throw ConfigError("link", "missing required object");
    require_object(doc["link"], "link");
    reject_unknown_keys(doc["link"], "link", {"bdp", "buffer"});
    cfg.link.bdp = get_number(doc["link"], "link", "bdp");
    cfg.link.buffer = get_number(doc["link"], "link", "buffer");

    if (!doc.contains("flows")) throw ConfigError("flows", "missing required object");
    require_object(doc["flows"], "flows");
    reject_unknown_keys(doc["flows"], "flows", {"count", "algorithm", "beta"});
    cfg.n_flows = get_count(doc["flows"], "flows", "count");
    cfg.algorithm = parse_algorithm(doc["flows"], "flows");

    if (!doc.contains("sync")) throw ConfigError("sync", "missing required object");
    require_object(doc["sync"], "sync");
    reject_unknown_keys(doc["sync"], "sync",
                        {"model", "p", "k", "threshold", "mark_fraction"});
    cfg.sync = parse_sync(doc["sync"], "sync");

    if (!doc.contains("run")) throw ConfigError("run", "missing required object");
    require_object(doc["run"], "run");
    reject_unknown_keys(doc["run"], "run",
                        {"duration", "seed", "theorem_mode", "record_per_flow"});
    cfg.duration = get_count(doc["run"], "run", "duration");
    cfg.seed = get_count(doc["run"], "run", "seed", std::uint64_t{1});
    cfg.theorem_mode = get_bool(doc["run"], "run", "theorem_mode", false);
    cfg.record_per_flow = get_bool(doc["run"], "run", "record_per_flow", false);

    if (doc.contains("band")) {
        require_object(doc["band"], "band");
        reject_unknown_keys(doc["band"], "band", {"delta_lo", "delta_hi"});
        bounds::FairnessBand band;
        band.delta_lo = get_number(doc["band"], "band", "delta_lo");
        band.delta_hi = get_number(doc["band"], "band", "delta_hi");
        try {
            band.validate();
        } catch (const std::domain_error& e) {
            throw ConfigError("band", e.what());
        }
        cfg.fairness_clamp = band;
    }

    try {
        cfg.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError("config", e.what());
    }
    return cfg;
}

ExperimentConfig parse_experiment(const json& doc) {
    require_object(doc, "config");
    reject_unknown_keys(doc, "config",
                        {"link", "flows", "sync", "run", "band", "sweep", "search",
                         "verify"});
    ExperimentConfig exp;
    exp.sim = parse_sim_config(doc);

    if (doc.contains("sweep")) {
        const auto& sw = doc["sweep"];
        require_object(sw, "sweep");
        reject_unknown_keys(sw, "sweep", {"parameter", "values"});
        SweepSpec spec;
        spec.parameter = get_string(sw, "sweep", "parameter");
        if (!sw.contains("values") || !sw["values"].is_array())
            throw ConfigError("sweep.values", "expected an array of numbers");
        for (const auto& v : sw["values"]) {
            if (!v.is_number()) throw ConfigError("sweep.values", "expected numbers");
            spec.values.push_back(v.get<double>());
        }
        if (spec.values.empty()) throw ConfigError("sweep.values", "empty value list");
        std::sort(spec.values.begin(), spec.values.end());
        // Validate the path applies before running anything.
        json probe = doc;
        apply_parameter(probe, spec.parameter, spec.values.front());
        exp.sweep = spec;
    }

    if (doc.contains("search")) {
        const auto& se = doc["search"];
        require_object(se, "search");
        reject_unknown_keys(se, "search", {"target", "tolerance", "window", "percentile"});
        SearchSpec spec;
        spec.target = get_number(se, "search", "target", 1.0);
        spec.tolerance = get_number(se, "search", "tolerance", 1.0);
        spec.window = get_count(se, "search", "window", std::uint64_t{1});
        spec.percentile = get_number(se, "search", "percentile", 0.0);
        if (!(spec.tolerance > 0))
            throw ConfigError("search.tolerance", "tolerance must be > 0");
        exp.search = spec;
    }

    if (doc.contains("verify")) {
        const auto& ve = doc["verify"];
        require_object(ve, "verify");
        reject_unknown_keys(ve, "verify", {"theorems", "seeds", "trials", "delta"});
        VerifySpec spec;
        if (!ve.contains("theorems") || !ve["theorems"].is_array())
            throw ConfigError("verify.theorems", "expected an array of theorem names");
        static const std::set<std::string> known = {
            "theorem2", "theorem3", "theorem4", "theorem5", "lemma6", "appendix_c"};
        for (const auto& t : ve["theorems"]) {
            if (!t.is_string())
                throw ConfigError("verify.theorems", "expected theorem names");
            std::string name = t.get<std::string>();
            if (!known.count(name))
                throw ConfigError("verify.theorems",
                                  "unknown check '" + name +
                                      "' (expected theorem2..theorem5, lemma6, "
                                      "or appendix_c)");
            spec.checks.push_back(name);
        }
        if (spec.checks.empty())
            throw ConfigError("verify.theorems", "empty theorem list");
        spec.seeds = get_count(ve, "verify", "seeds", std::uint64_t{10});
        spec.trials = get_count(ve, "verify", "trials", std::uint64_t{10000});
        spec.delta = get_number(ve, "verify", "delta", 0.05);
        exp.verify = spec;
    }

    return exp;
}

ExperimentConfig parse_experiment_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_experiment(doc);
}

json to_json(const sim::SimConfig& cfg) {
    json flows = {{"count", cfg.n_flows}, {"algorithm", cfg.algorithm.name()}};
    if (cfg.algorithm.algo == cc::Algo::MultiplicativeDecrease)
        flows["beta"] = cfg.algorithm.beta;

    json sync = {{"model", cfg.sync.name()}};
    switch (cfg.sync.kind) {
        case sim::SyncKind::Bernoulli: sync["p"] = cfg.sync.p; break;
        case sim::SyncKind::LargestFirst: sync["k"] = cfg.sync.k; break;
        case sim::SyncKind::EcnThreshold:
            sync["threshold"] = cfg.sync.threshold;
            sync["mark_fraction"] = cfg.sync.mark_fraction;
            break;
        default: break;
    }

    json doc = {
        {"link", {{"bdp", cfg.link.bdp}, {"buffer", cfg.link.buffer}}},
        {"flows", flows},
        {"sync", sync},
        {"run",
         {{"duration", cfg.duration},
          {"seed", cfg.seed},
          {"theorem_mode", cfg.theorem_mode},
          {"record_per_flow", cfg.record_per_flow}}},
    };
    if (cfg.fairness_clamp)
        doc["band"] = {{"delta_lo", cfg.fairness_clamp->delta_lo},
                       {"delta_hi", cfg.fairness_clamp->delta_hi}};
    return doc;
}

void apply_parameter(json& doc, const std::string& path, double value) {
    static const std::set<std::string> integral = {
        "flows.count", "run.duration", "run.seed", "sync.k"};
    static const std::set<std::string> numeric = {
        "link.bdp",      "link.buffer",       "sync.p",
        "sync.threshold", "sync.mark_fraction", "band.delta_lo",
        "band.delta_hi"};

    auto dot = path.find('.');
    if (dot == std::string::npos)
        throw ConfigError("sweep.parameter", "unknown parameter '" + path + "'");
    std::string head = path.substr(0, dot);
    std::string tail = path.substr(dot + 1);

    if (integral.count(path)) {
        if (value < 0 || value != std::floor(value))
            throw ConfigError("sweep.values",
                              "'" + path + "' needs non-negative integers");
        doc[head][tail] = static_cast<std::uint64_t>(value);
    } else if (numeric.count(path)) {
        doc[head][tail] = value;
    } else {
        throw ConfigError("sweep.parameter", "unknown parameter '" + path + "'");
    }
}

}  // namespace bufsim::config
