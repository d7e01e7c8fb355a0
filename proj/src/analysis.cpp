#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bufsim::analysis {

namespace {

constexpr double kEps = 1e-9;

double nearest_rank(std::vector<double> values, double percentile) {
    if (values.empty()) throw std::domain_error("percentile of empty sample");
    if (!(percentile >= 0 && percentile <= 1))
        throw std::domain_error("percentile must be in [0, 1]");
    std::sort(values.begin(), values.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(percentile * static_cast<double>(values.size())));
    if (rank < 1) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

}  // namespace

bounds::FairnessBand measure_fairness(const sim::Trace& trace, double bdp,
                                      double n) {
    if (!trace.has_per_flow())
        throw std::invalid_argument(
            "measure_fairness: trace has no per-flow windows");
    std::vector<double> pool;
    pool.reserve(trace.slots.size() * trace.slots.front().per_flow_windows.size());
    for (const auto& s : trace.slots)
        pool.insert(pool.end(), s.per_flow_windows.begin(), s.per_flow_windows.end());
    std::sort(pool.begin(), pool.end());
    auto at = [&](double p) {
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(pool.size())));
        if (rank < 1) rank = 1;
        if (rank > pool.size()) rank = pool.size();
        return pool[rank - 1];
    };
    bounds::FairnessBand band;
    band.delta_lo = at(0.01) * n / bdp;
    band.delta_hi = at(0.99) * n / bdp;
    return band;
}

bounds::FairnessBand measure_fairness(const sim::Trace& trace) {
    return measure_fairness(trace, trace.config.link.bdp,
                            static_cast<double>(trace.config.n_flows));
}

Histogram queue_histogram(const sim::Trace& trace, std::uint64_t bins,
                          const std::optional<bounds::FairnessBand>& band) {
    if (bins < 1) throw std::domain_error("queue_histogram: bins must be >= 1");
    if (trace.slots.empty()) throw std::domain_error("queue_histogram: empty trace");
    const double hi = std::max(trace.config.link.buffer, 1.0);
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::uint64_t i = 0; i <= bins; ++i)
        h.edges[i] = hi * static_cast<double>(i) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (const auto& s : trace.slots) {
        auto b = static_cast<std::uint64_t>(s.queue / hi * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        ++h.counts[b];
        ++h.total;
    }
    if (band)
        h.predicted_min_buffer = bounds::sqrt_n_buffer(
            *band, trace.config.link.bdp, static_cast<double>(trace.config.n_flows));
    return h;
}

FlowsPerLoss flows_per_loss(const sim::Trace& trace,
                            const std::optional<bounds::FairnessBand>& band) {
    FlowsPerLoss out;
    for (const auto& s : trace.slots)
        if (s.loss_event) out.per_event.push_back(s.decreasing_flows.size());
    if (!out.per_event.empty())
        out.mean = std::accumulate(out.per_event.begin(), out.per_event.end(), 0.0) /
                   static_cast<double>(out.per_event.size());
    if (band) {
        out.stated_cap = bounds::theorem2_window_floor(
                             *band, trace.config.link.bdp, trace.config.link.buffer,
                             static_cast<double>(trace.config.n_flows))
                             .premise_cap;
        for (auto c : out.per_event)
            if (static_cast<double>(c) > *out.stated_cap + kEps)
                ++out.events_over_stated_cap;
    }
    return out;
}

double min_utilization(const sim::Trace& trace, std::uint64_t window,
                       double percentile) {
    const std::size_t t = trace.slots.size();
    if (window < 1) throw std::domain_error("min_utilization: window must be >= 1");
    if (window > t)
        throw std::domain_error("min_utilization: window longer than trace");
    std::vector<double> prefix(t + 1, 0.0);
    for (std::size_t i = 0; i < t; ++i)
        prefix[i + 1] = prefix[i] + trace.slots[i].utilization;
    std::vector<double> means;
    means.reserve(t - window + 1);
    for (std::size_t i = 0; i + window <= t; ++i)
        means.push_back((prefix[i + window] - prefix[i]) / static_cast<double>(window));
    return nearest_rank(std::move(means), percentile);
}

SearchResult search_min_buffer(const sim::SimConfig& config_template,
                               double target, double tolerance,
                               std::uint64_t window, double percentile) {
    if (!(tolerance > 0)) throw std::domain_error("search: tolerance must be > 0");
    const double bdp = config_template.link.bdp;
    auto evaluate = [&](double buffer) {
        sim::SimConfig cfg = config_template;
        cfg.link.buffer = buffer;
        return min_utilization(sim::run(cfg), window, percentile);
    };

    SearchResult out;
    const double u0 = evaluate(0.0);
    const double u1 = evaluate(bdp);
    const double u2 = evaluate(2.0 * bdp);
    // Guard against misuse with a model whose utilization is not monotone in
    // the buffer; coarse probes with slack for run-to-run wobble.
    out.monotone = u1 >= u0 - 0.02 && u2 >= u1 - 0.02;

    if (u2 < target) {
        out.satisfiable = false;
        out.bracket_lo = 2.0 * bdp;
        out.bracket_hi = 2.0 * bdp;
        return out;
    }
    out.satisfiable = true;
    if (u0 >= target) {
        out.buffer = 0;
        out.bracket_lo = 0;
        out.bracket_hi = 0;
        return out;
    }
    double lo = 0, hi = 2.0 * bdp;
    if (u1 >= target) hi = bdp;
    else lo = bdp;
    while (hi - lo > tolerance) {
        double mid = 0.5 * (lo + hi);
        if (evaluate(mid) >= target) hi = mid;
        else lo = mid;
    }
    out.buffer = hi;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

std::string theorem_name(TheoremId id) {
    switch (id) {
        case TheoremId::Theorem2: return "theorem2";
        case TheoremId::Theorem3: return "theorem3";
        case TheoremId::Theorem4: return "theorem4";
        case TheoremId::Theorem5: return "theorem5";
        case TheoremId::AppendixC: return "appendix_c";
    }
    return "unknown";
}

std::optional<TheoremId> theorem_from_name(const std::string& name) {
    if (name == "theorem2") return TheoremId::Theorem2;
    if (name == "theorem3") return TheoremId::Theorem3;
    if (name == "theorem4") return TheoremId::Theorem4;
    if (name == "theorem5") return TheoremId::Theorem5;
    if (name == "appendix_c") return TheoremId::AppendixC;
    return std::nullopt;
}

namespace {

void record_violation(VerificationReport& r, std::uint64_t slot, double slack) {
    ++r.violations;
    if (r.violation_slots.size() < 32) r.violation_slots.push_back(slot);
    r.margin = std::min(r.margin, slack);
}

// Window-floor style check shared by Theorems 2-4: premises are band
// containment, windows >= 2, and the epoch's anchoring loss event staying
// under the per-event cap; the conclusion is a floor on W(t).
VerificationReport check_window_floor(const sim::Trace& trace, TheoremId id,
                                      const bounds::FairnessBand& band,
                                      double floor_packets) {
    if (!trace.has_per_flow())
        throw std::invalid_argument("verify_theorem: trace has no per-flow windows");
    const double bdp = trace.config.link.bdp;
    const double n = static_cast<double>(trace.config.n_flows);
    const double lo = band.delta_lo * bdp / n;
    const double hi = band.delta_hi * bdp / n;
    const double event_cap = bounds::theorem2_event_cap(band, bdp, n);

    VerificationReport r;
    r.theorem = id;
    r.margin = std::numeric_limits<double>::infinity();

    bool in_epoch = false;    // a loss event has anchored the floor
    bool epoch_ok = false;    // that event respected the cap
    for (const auto& s : trace.slots) {
        if (s.loss_event) {
            in_epoch = true;
            epoch_ok = static_cast<double>(s.decreasing_flows.size()) <=
                       event_cap + kEps;
        }
        bool pointwise = true;
        for (double w : s.per_flow_windows) {
            if (w < lo - kEps || w > hi + kEps || w < 2.0 - kEps) {
                pointwise = false;
                break;
            }
        }
        if (!pointwise || !in_epoch || !epoch_ok) continue;
        ++r.premise_slots;
        ++r.checked_slots;
        double slack = s.aggregate_window - floor_packets;
        if (slack < -kEps) record_violation(r, s.slot, slack);
        else r.margin = std::min(r.margin, slack);
    }
    r.premises_ever_held = r.premise_slots > 0;
    r.pass = r.premises_ever_held && r.violations == 0;
    if (!r.premises_ever_held) r.note = "premises never held";
    if (!std::isfinite(r.margin)) r.margin = 0;
    return r;
}

}  // namespace

VerificationReport verify_theorem(const sim::Trace& trace, TheoremId id,
                                  const bounds::FairnessBand& band) {
    band.validate();
    const double bdp = trace.config.link.bdp;
    const double buffer = trace.config.link.buffer;
    const double n = static_cast<double>(trace.config.n_flows);

    switch (id) {
        case TheoremId::Theorem2: {
            double floor = bounds::theorem2_window_floor(band, bdp, buffer, n).floor;
            return check_window_floor(trace, id, band, floor);
        }
        case TheoremId::Theorem3: {
            double needed = bounds::sqrt_n_buffer(band, bdp, n);
            if (buffer < needed - kEps) {
                VerificationReport r;
                r.theorem = id;
                r.note = "premises never held (buffer below delta_hi*bdp/sqrt(n))";
                return r;
            }
            // Full utilization: W(t) >= bdp on every premise slot.
            auto r = check_window_floor(trace, id, band, bdp);
            return r;
        }
        case TheoremId::Theorem4: {
            double mu_floor = bounds::utilization_floor(band, n);
            auto r = check_window_floor(trace, id, band, mu_floor * bdp);
            // Report the margin in utilization terms.
            r.margin /= bdp;
            return r;
        }
        case TheoremId::Theorem5: {
            VerificationReport r;
            r.theorem = id;
            if (trace.config.algorithm.algo != cc::Algo::BbrIncrement) {
                r.note = "premises never held (algorithm is not bbr_increment)";
                return r;
            }
            double ratio = buffer / (band.delta_hi * bdp);
            double delta = std::exp(-2.0 * n * ratio * ratio);
            std::uint64_t below = 0;
            for (const auto& s : trace.slots)
                if (s.utilization < 1.0 - kEps) ++below;
            r.premises_ever_held = true;
            r.premise_slots = trace.slots.size();
            r.checked_slots = trace.slots.size();
            double frac = static_cast<double>(below) /
                          static_cast<double>(trace.slots.size());
            double allowance =
                delta + 3.0 * std::sqrt(std::max(delta, 1e-12) /
                                        static_cast<double>(trace.slots.size()));
            r.margin = allowance - frac;
            if (frac > allowance) {
                r.violations = 1;
                r.pass = false;
            } else {
                r.pass = true;
            }
            return r;
        }
        case TheoremId::AppendixC: {
            if (!trace.has_per_flow())
                throw std::invalid_argument(
                    "verify_theorem: trace has no per-flow windows");
            VerificationReport r;
            r.theorem = id;
            r.margin = std::numeric_limits<double>::infinity();
            // The decrease condition assumes pure halving. A window whose
            // half would land under the engine's floor (or the enforced band
            // bottom) gives back less, so such events fall outside the
            // premise.
            double lo = trace.config.window_floor();
            if (trace.config.theorem_mode && trace.config.fairness_clamp)
                lo = std::max(lo, trace.config.fairness_clamp->delta_lo * bdp / n);
            const double w_req = std::max(2.0, 2.0 * lo);
            for (std::size_t t = 0; t + 1 < trace.slots.size(); ++t) {
                const auto& s = trace.slots[t];
                if (s.decreasing_flows.empty()) continue;
                double w_min = std::numeric_limits<double>::infinity();
                for (auto i : s.decreasing_flows)
                    w_min = std::min(w_min, s.per_flow_windows[i]);
                if (w_min < w_req - kEps) continue;
                double need = bounds::min_decreasing_flows(n, w_min);
                if (static_cast<double>(s.decreasing_flows.size()) < need) continue;
                ++r.premise_slots;
                ++r.checked_slots;
                double slack = s.aggregate_window -
                               trace.slots[t + 1].aggregate_window;
                if (slack < -kEps) record_violation(r, s.slot, slack);
                else r.margin = std::min(r.margin, slack);
            }
            r.premises_ever_held = r.premise_slots > 0;
            r.pass = r.premises_ever_held && r.violations == 0;
            if (!r.premises_ever_held) r.note = "premises never held";
            if (!std::isfinite(r.margin)) r.margin = 0;
            return r;
        }
    }
    throw std::logic_error("verify_theorem: unknown theorem");
}

MonteCarloResult monte_carlo_bound(MonteCarloCheck check,
                                   const MonteCarloParams& params,
                                   std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1000)
        throw std::domain_error("monte_carlo_bound: need at least 1000 trials");
    params.band.validate();
    const double n = params.n;
    const double bdp = params.bdp;

    MonteCarloResult out;
    out.trials = trials;
    std::uint64_t events = 0;

    if (check == MonteCarloCheck::Theorem5) {
        // Worst case: every flow sees a loss at W = bdp + B. The link loses
        // utilization next slot only if the summed increments drag the
        // aggregate below bdp, i.e. sum X_i < -B.
        out.check = "theorem5";
        const double buffer = bounds::bbr_buffer(params.band, bdp, n, params.delta);
        out.threshold = buffer;
        out.bound = params.delta;
        const auto flows = static_cast<std::uint64_t>(n);
        for (std::uint64_t t = 0; t < trials; ++t) {
            Rng rng = Rng::stream(seed, stream_id::kTrial + t);
            double sum = 0;
            for (std::uint64_t i = 0; i < flows; ++i) {
                double base = params.band.delta_lo == params.band.delta_hi
                                  ? params.band.delta_lo * bdp / n
                                  : rng.uniform(params.band.delta_lo,
                                                params.band.delta_hi) * bdp / n;
                std::uint64_t die = rng.below(8);
                if (die == 0) sum -= base / 4.0;
                else if (die == 1) sum += base / 4.0;
            }
            if (sum < -buffer) ++events;
        }
    } else {
        out.check = "lemma6";
        const double p = params.p.value_or(std::min(1.0, n / (params.band.delta_lo * bdp)));
        if (!(p > 0 && p <= 1))
            throw std::domain_error("monte_carlo_bound: p must be in (0, 1]");
        const auto tail = bounds::bernoulli_sync_tail(params.band, bdp, n);
        out.threshold = tail.threshold;
        out.bound = tail.probability;
        const auto flows = static_cast<std::uint64_t>(n);
        for (std::uint64_t t = 0; t < trials; ++t) {
            Rng rng = Rng::stream(seed, stream_id::kTrial + t);
            std::uint64_t count = 0;
            for (std::uint64_t i = 0; i < flows; ++i)
                if (rng.bernoulli(p)) ++count;
            if (static_cast<double>(count) > tail.threshold) ++events;
        }
    }

    out.empirical = static_cast<double>(events) / static_cast<double>(trials);
    out.margin = 3.0 * std::sqrt(out.bound / static_cast<double>(trials));
    out.pass = out.empirical <= out.bound + out.margin;
    return out;
}

}  // namespace bufsim::analysis
