#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace bufsim::experiment {

using nlohmann::json;

json report_json(const analysis::VerificationReport& r) {
    return json{{"theorem", analysis::theorem_name(r.theorem)},
                {"pass", r.pass},
                {"premises_ever_held", r.premises_ever_held},
                {"premise_slots", r.premise_slots},
                {"checked_slots", r.checked_slots},
                {"violations", r.violations},
                {"violation_slots", r.violation_slots},
                {"margin", r.margin},
                {"note", r.note}};
}

json monte_carlo_json(const analysis::MonteCarloResult& m) {
    return json{{"check", m.check},     {"trials", m.trials},
                {"empirical", m.empirical}, {"bound", m.bound},
                {"margin", m.margin},   {"pass", m.pass},
                {"threshold", m.threshold}};
}

json summarize(const sim::Trace& trace,
               const std::vector<analysis::VerificationReport>& reports,
               std::optional<double> min_buffer) {
    json out;
    out["tool_version"] = kToolVersion;
    out["config"] = config::to_json(trace.config);
    out["min_buffer"] = min_buffer ? json(*min_buffer) : json(nullptr);

    std::optional<bounds::FairnessBand> band;
    if (trace.has_per_flow()) {
        band = analysis::measure_fairness(trace);
        out["fairness"] = {{"lo", band->delta_lo}, {"hi", band->delta_hi}};
    } else {
        if (trace.config.fairness_clamp) band = trace.config.fairness_clamp;
        out["fairness"] = nullptr;
    }

    const auto window = std::min<std::uint64_t>(10, trace.slots.size());
    out["utilization"] = {{"p1", analysis::min_utilization(trace, window, 0.01)},
                          {"p50", analysis::min_utilization(trace, window, 0.5)}};

    auto hist = analysis::queue_histogram(trace, 20, band);
    out["histogram"] = {{"edges", hist.edges},
                        {"counts", hist.counts},
                        {"total", hist.total},
                        {"cutoff", hist.predicted_min_buffer
                                       ? json(*hist.predicted_min_buffer)
                                       : json(nullptr)}};

    json tr = json::array();
    for (const auto& r : reports) tr.push_back(report_json(r));
    out["theorem_reports"] = tr;
    return out;
}

namespace {

SweepPoint run_point(const json& base_doc, const std::string& parameter,
                     double value) {
    SweepPoint point;
    point.value = value;
    try {
        json doc = base_doc;
        doc.erase("sweep");
        config::apply_parameter(doc, parameter, value);
        auto exp = config::parse_experiment(doc);

        std::optional<double> min_buffer;
        sim::SimConfig final_cfg = exp.sim;
        if (exp.search) {
            auto result = analysis::search_min_buffer(
                exp.sim, exp.search->target, exp.search->tolerance,
                exp.search->window, exp.search->percentile);
            if (result.satisfiable) {
                min_buffer = result.buffer;
                final_cfg.link.buffer = result.buffer;
            }
            final_cfg.record_per_flow = true;
        }
        auto trace = sim::run(final_cfg);
        point.summary = summarize(trace, {}, min_buffer);
        point.ok = true;
    } catch (const std::exception& e) {
        point.ok = false;
        point.error = e.what();
    }
    return point;
}

}  // namespace

SweepOutcome run_sweep(const json& base_doc, const config::ExperimentConfig& exp,
                       unsigned jobs) {
    if (!exp.sweep) throw config::ConfigError("sweep", "missing sweep section");
    SweepOutcome out;
    out.parameter = exp.sweep->parameter;
    out.points.resize(exp.sweep->values.size());

    const auto& values = exp.sweep->values;
    if (jobs <= 1 || values.size() <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out.points[i] = run_point(base_doc, out.parameter, values[i]);
    } else {
        std::vector<std::thread> workers;
        std::atomic<std::size_t> next{0};
        unsigned count = std::min<unsigned>(jobs, values.size());
        for (unsigned w = 0; w < count; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < values.size();
                     i = next.fetch_add(1))
                    out.points[i] = run_point(base_doc, out.parameter, values[i]);
            });
        }
        for (auto& t : workers) t.join();
    }
    for (const auto& p : out.points)
        if (!p.ok) out.all_ok = false;
    return out;
}

namespace {

VerifyEntry aggregate_trace_entry(const std::string& id,
                                  const std::vector<analysis::VerificationReport>& rs) {
    VerifyEntry entry;
    entry.id = id;
    std::uint64_t violations = 0;
    std::uint64_t held = 0;
    double margin = std::numeric_limits<double>::infinity();
    bool all_pass = true;
    for (const auto& r : rs) {
        violations += r.violations;
        if (r.premises_ever_held) {
            ++held;
            margin = std::min(margin, r.margin);
        }
        if (!r.pass) all_pass = false;
    }
    entry.premises_never_held = held == 0;
    entry.pass = all_pass && held == rs.size();
    if (entry.premises_never_held) {
        entry.detail = "premises never held";
    } else {
        entry.detail = std::to_string(held) + "/" + std::to_string(rs.size()) +
                       " seeds with premises held, " + std::to_string(violations) +
                       " violations, worst margin " + std::to_string(margin);
    }
    json seeds = json::array();
    for (const auto& r : rs) seeds.push_back(report_json(r));
    entry.data = {{"seeds", seeds}};
    return entry;
}

VerifyEntry mc_entry(const std::string& id, const analysis::MonteCarloResult& m) {
    VerifyEntry entry;
    entry.id = id;
    entry.pass = m.pass;
    entry.detail = "empirical " + std::to_string(m.empirical) + " vs bound " +
                   std::to_string(m.bound) + " (+" + std::to_string(m.margin) + ")";
    entry.data = monte_carlo_json(m);
    return entry;
}

std::vector<analysis::VerificationReport> run_trace_checks(
    const sim::SimConfig& base, analysis::TheoremId id,
    std::uint64_t seeds) {
    std::vector<analysis::VerificationReport> rs;
    for (std::uint64_t s = 0; s < seeds; ++s) {
        sim::SimConfig cfg = base;
        cfg.seed = base.seed + s;
        cfg.record_per_flow = true;
        auto trace = sim::run(cfg);
        auto band = cfg.fairness_clamp ? *cfg.fairness_clamp
                                       : analysis::measure_fairness(trace);
        rs.push_back(analysis::verify_theorem(trace, id, band));
    }
    return rs;
}

}  // namespace

VerifyOutcome verify_default_suite(std::uint64_t seed) {
    VerifyOutcome out;

    // Capped-synchronization population: n almost-fair Reno flows where each
    // loss event touches the must-decrease minimum plus sqrt(n) extras.
    sim::SimConfig cfg;
    cfg.link = {1000.0, 0.0};
    cfg.n_flows = 64;
    cfg.algorithm = cc::AlgorithmKind::reno();
    cfg.sync = sim::SyncModel::sqrt_extra();
    cfg.duration = 2000;
    cfg.seed = seed;
    cfg.theorem_mode = true;
    cfg.fairness_clamp = bounds::FairnessBand{0.9, 2.0};
    cfg.record_per_flow = true;

    sim::SimConfig floor_cfg = cfg;
    floor_cfg.link.buffer =
        bounds::sqrt_n_buffer(*cfg.fairness_clamp, cfg.link.bdp,
                              static_cast<double>(cfg.n_flows));

    out.entries.push_back(aggregate_trace_entry(
        "theorem2",
        run_trace_checks(floor_cfg, analysis::TheoremId::Theorem2, 10)));
    out.entries.push_back(aggregate_trace_entry(
        "theorem3",
        run_trace_checks(floor_cfg, analysis::TheoremId::Theorem3, 10)));

    sim::SimConfig zero_cfg = cfg;
    zero_cfg.link.buffer = 0.0;
    out.entries.push_back(aggregate_trace_entry(
        "theorem4",
        run_trace_checks(zero_cfg, analysis::TheoremId::Theorem4, 10)));

    analysis::MonteCarloParams bbr_params;
    bbr_params.n = 100;
    bbr_params.bdp = 1000;
    bbr_params.band = {1.0, 2.0};
    bbr_params.delta = 0.05;
    out.entries.push_back(mc_entry(
        "theorem5", analysis::monte_carlo_bound(analysis::MonteCarloCheck::Theorem5,
                                                bbr_params, 10000, seed)));

    analysis::MonteCarloParams bern_params;
    bern_params.n = 100;
    bern_params.bdp = 100;
    bern_params.band = {1.0, 1.0};
    out.entries.push_back(mc_entry(
        "lemma6", analysis::monte_carlo_bound(analysis::MonteCarloCheck::Lemma6,
                                              bern_params, 100000, seed)));

    sim::SimConfig free_cfg;
    free_cfg.link = {1000.0, 1000.0};
    free_cfg.n_flows = 16;
    free_cfg.algorithm = cc::AlgorithmKind::reno();
    free_cfg.sync = sim::SyncModel::sqrt_extra();
    free_cfg.duration = 2000;
    free_cfg.seed = seed;
    free_cfg.record_per_flow = true;
    out.entries.push_back(aggregate_trace_entry(
        "appendix_c",
        run_trace_checks(free_cfg, analysis::TheoremId::AppendixC, 5)));

    out.all_pass = std::all_of(out.entries.begin(), out.entries.end(),
                               [](const VerifyEntry& e) { return e.pass; });
    return out;
}

VerifyOutcome verify_with_config(const config::ExperimentConfig& exp) {
    if (!exp.verify) throw config::ConfigError("verify", "missing verify section");
    const auto& spec = *exp.verify;
    VerifyOutcome out;

    for (const auto& name : spec.checks) {
        if (name == "theorem5") {
            analysis::MonteCarloParams params;
            params.n = static_cast<double>(exp.sim.n_flows);
            params.bdp = exp.sim.link.bdp;
            params.band = exp.sim.fairness_clamp.value_or(bounds::FairnessBand{1.0, 2.0});
            params.delta = spec.delta;
            out.entries.push_back(mc_entry(
                name, analysis::monte_carlo_bound(analysis::MonteCarloCheck::Theorem5,
                                                  params, spec.trials, exp.sim.seed)));
        } else if (name == "lemma6") {
            analysis::MonteCarloParams params;
            params.n = static_cast<double>(exp.sim.n_flows);
            params.bdp = exp.sim.link.bdp;
            params.band = exp.sim.fairness_clamp.value_or(bounds::FairnessBand{1.0, 1.0});
            if (exp.sim.sync.kind == sim::SyncKind::Bernoulli)
                params.p = exp.sim.sync.p;
            out.entries.push_back(mc_entry(
                name, analysis::monte_carlo_bound(analysis::MonteCarloCheck::Lemma6,
                                                  params, spec.trials, exp.sim.seed)));
        } else {
            auto id = analysis::theorem_from_name(name);
            out.entries.push_back(aggregate_trace_entry(
                name, run_trace_checks(exp.sim, *id, spec.seeds)));
        }
    }
    out.all_pass = std::all_of(out.entries.begin(), out.entries.end(),
                               [](const VerifyEntry& e) { return e.pass; });
    return out;
}

json verify_json(const VerifyOutcome& outcome) {
    json checks = json::array();
    for (const auto& e : outcome.entries)
        checks.push_back(json{{"id", e.id},
                              {"pass", e.pass},
                              {"premises_never_held", e.premises_never_held},
                              {"detail", e.detail},
                              {"data", e.data}});
    return json{{"all_pass", outcome.all_pass}, {"checks", checks}};
}

}  // namespace bufsim::experiment
