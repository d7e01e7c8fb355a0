#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace bufsim::sim {

SyncModel SyncModel::bernoulli(double p) {
    if (!(p >= 0 && p <= 1)) throw std::domain_error("SyncModel: p must be in [0, 1]");
    SyncModel m{SyncKind::Bernoulli};
    m.p = p;
    return m;
}

SyncModel SyncModel::largest_first(std::uint64_t k) {
    SyncModel m{SyncKind::LargestFirst};
    m.k = k;
    return m;
}

SyncModel SyncModel::ecn_threshold(double threshold, double mark_fraction) {
    if (!(threshold >= 0)) throw std::domain_error("SyncModel: threshold must be >= 0");
    if (!(mark_fraction > 0 && mark_fraction <= 1))
        throw std::domain_error("SyncModel: mark_fraction must be in (0, 1]");
    SyncModel m{SyncKind::EcnThreshold};
    m.threshold = threshold;
    m.mark_fraction = mark_fraction;
    return m;
}

std::string SyncModel::name() const {
    switch (kind) {
        case SyncKind::Minimal: return "minimal";
        case SyncKind::SqrtExtra: return "sqrt_extra";
        case SyncKind::FullySynchronized: return "full_sync";
        case SyncKind::Bernoulli: return "bernoulli";
        case SyncKind::LargestFirst: return "largest_first";
        case SyncKind::EcnThreshold: return "ecn_threshold";
    }
    return "unknown";
}

void SimConfig::validate() const {
    link.validate();
    if (n_flows < 1) throw std::domain_error("SimConfig: n_flows must be >= 1");
    if (duration < 1) throw std::domain_error("SimConfig: duration must be >= 1");
    if (fairness_clamp) fairness_clamp->validate();
    if (sync.is_ecn() && sync.threshold > link.buffer)
        throw std::domain_error("SimConfig: ECN threshold must not exceed the buffer");
}

// How much window a flow actually gives back when signalled, given the
// engine's floor. Non-multiplicative kinds fall back to the halving proxy.
static double signalled_decrease(const cc::FlowState& f, double floor) {
    double beta = 0.5;
    switch (f.algorithm.algo) {
        case cc::Algo::Reno:
        case cc::Algo::MultiplicativeDecrease:
        case cc::Algo::Cubic:
        case cc::Algo::Scalable:
            beta = f.algorithm.decrease_factor();
            break;
        default:
            break;
    }
    return f.window - std::max(f.window * beta, floor);
}

// Prefix of a uniform shuffle just long enough that the aggregate window
// shrinks: the chosen flows' give-back must cover the remaining flows'
// additive growth, sum_D (w_i - beta w_i) >= n - |D|. For equal windows this
// is exactly the ceil(n / (1 + w/2)) count; for unequal windows it is never
// larger than ceil(n / (1 + w_min(D)/2)), the union-bound form.
static std::size_t minimal_prefix(const std::vector<std::uint32_t>& order,
                                  const std::vector<cc::FlowState>& flows,
                                  double floor) {
    const double n = static_cast<double>(flows.size());
    double give_back = 0;
    for (std::size_t m = 1; m <= order.size(); ++m) {
        give_back += signalled_decrease(flows[order[m - 1]], floor);
        if (give_back + static_cast<double>(m) >= n) return m;
    }
    return order.size();
}

std::vector<std::uint32_t> allocate_congestion(const SyncModel& sync,
                                               const std::vector<cc::FlowState>& flows,
                                               const model::AggregateState& state,
                                               Rng& rng, double window_floor) {
    (void)state;
    if (flows.empty())
        throw std::invalid_argument("allocate_congestion: empty flow set");
    const std::size_t n = flows.size();

    std::vector<std::uint32_t> chosen;
    switch (sync.kind) {
        case SyncKind::FullySynchronized: {
            chosen.resize(n);
            std::iota(chosen.begin(), chosen.end(), 0);
            return chosen;
        }
        case SyncKind::Minimal:
        case SyncKind::SqrtExtra: {
            std::vector<std::uint32_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            std::size_t m = minimal_prefix(order, flows, window_floor);
            if (sync.kind == SyncKind::SqrtExtra) {
                std::size_t extra =
                    static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
                m = std::min(n, m + extra);
            }
            chosen.assign(order.begin(), order.begin() + m);
            break;
        }
        case SyncKind::Bernoulli: {
            for (std::uint32_t i = 0; i < n; ++i)
                if (rng.bernoulli(sync.p)) chosen.push_back(i);
            break;
        }
        case SyncKind::LargestFirst: {
            std::vector<std::uint32_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::uint32_t a, std::uint32_t b) {
                                 return flows[a].window > flows[b].window;
                             });
            std::size_t m = std::min<std::size_t>(n, sync.k);
            chosen.assign(order.begin(), order.begin() + m);
            break;
        }
        case SyncKind::EcnThreshold: {
            std::vector<std::uint32_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            std::size_t m = static_cast<std::size_t>(
                std::ceil(sync.mark_fraction * static_cast<double>(n)));
            m = std::min(n, std::max<std::size_t>(m, 1));
            chosen.assign(order.begin(), order.begin() + m);
            break;
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

Simulation::Simulation(const SimConfig& config) : config_(config) {
    config_.validate();
    sync_rng_ = Rng::stream(config_.seed, stream_id::kSync);
    flow_rng_ = Rng::stream(config_.seed, stream_id::kFlow);
    Rng init_rng = Rng::stream(config_.seed, stream_id::kInit);

    const double n = static_cast<double>(config_.n_flows);
    const double fair_share = (config_.link.bdp + config_.link.buffer) / n;
    const double base_share = config_.link.bdp / n;

    flows_.resize(config_.n_flows);
    for (auto& f : flows_) {
        f.algorithm = config_.algorithm;
        if (config_.fairness_clamp) {
            const auto& band = *config_.fairness_clamp;
            f.window = init_rng.uniform(band.delta_lo, band.delta_hi) * base_share;
            f.bbr_base = init_rng.uniform(band.delta_lo, band.delta_hi) * base_share;
        } else {
            f.window = fair_share;
            f.bbr_base = base_share;
        }
        if (f.algorithm.algo == cc::Algo::BbrCycle) {
            f.bbr_phase = cc::random_initial_phase(init_rng);
            f.window = f.bbr_base *
                       (f.bbr_phase == cc::kProbePhase ? 1.25 : 1.0);
        }
        f.window = std::max(f.window, config_.window_floor());
    }
}

SlotTelemetry Simulation::step() {
    const auto& link = config_.link;
    const double n = static_cast<double>(flows_.size());

    double aggregate = 0;
    for (const auto& f : flows_) aggregate += f.window;
    model::AggregateState agg = model::aggregate_state(aggregate, link);

    const bool drop = model::loss_predicate(aggregate, link);
    const bool triggered =
        config_.sync.is_ecn() ? agg.queue >= config_.sync.threshold : drop;

    SlotTelemetry rec;
    rec.slot = slot_;
    rec.aggregate_window = aggregate;
    rec.queue = agg.queue;
    rec.utilization = agg.utilization;
    rec.loss_event = triggered;
    if (triggered)
        rec.decreasing_flows = allocate_congestion(config_.sync, flows_, agg, sync_rng_,
                                                   config_.window_floor());
    if (config_.record_per_flow) {
        rec.per_flow_windows.reserve(flows_.size());
        for (const auto& f : flows_) rec.per_flow_windows.push_back(f.window);
    }

    std::vector<char> in_d(flows_.size(), 0);
    for (auto i : rec.decreasing_flows) in_d[i] = 1;

    // Drops physically cap in-flight at bdp + B. For the probe-cycle kind the
    // post-loss window is computed from that capped value, so trim the
    // probing flows' windows before the transition (at most base/4 each).
    if (drop && config_.algorithm.algo == cc::Algo::BbrCycle) {
        double excess = aggregate - (link.bdp + link.buffer);
        if (excess > 0) {
            double probe_base = 0;
            for (const auto& f : flows_)
                if (f.bbr_phase == cc::kProbePhase) probe_base += f.bbr_base;
            if (probe_base > 0) {
                for (auto& f : flows_) {
                    if (f.bbr_phase != cc::kProbePhase) continue;
                    double trim = std::min(excess * f.bbr_base / probe_base,
                                           f.bbr_base / 4.0);
                    f.window -= trim;
                }
            }
        }
    }

    for (std::size_t i = 0; i < flows_.size(); ++i) {
        auto& f = flows_[i];
        if (f.algorithm.is_bbr()) {
            f = cc::advance_bbr(f, in_d[i] != 0, &flow_rng_);
        } else if (in_d[i]) {
            f = cc::decrease(f, &flow_rng_);
        } else {
            f = cc::increase(f);
        }
    }

    const double floor = config_.window_floor();
    for (auto& f : flows_) {
        if (f.window < floor) {
            f.window = floor;
            rec.floor_clamped = true;
        }
    }
    if (config_.theorem_mode && config_.fairness_clamp) {
        const auto& band = *config_.fairness_clamp;
        const double lo = std::max(band.delta_lo * link.bdp / n, floor);
        const double hi = std::max(band.delta_hi * link.bdp / n, floor);
        for (auto& f : flows_) f.window = std::clamp(f.window, lo, hi);
    }

    ++slot_;
    return rec;
}

Trace run(const SimConfig& config) {
    Simulation sim(config);
    Trace trace;
    trace.config = config;
    trace.slots.reserve(config.duration);
    for (std::uint64_t t = 0; t < config.duration; ++t) {
        try {
            trace.slots.push_back(sim.step());
        } catch (const std::exception& e) {
            throw std::runtime_error("slot " + std::to_string(t) + ": " + e.what());
        }
    }
    return trace;
}

static void append_g6(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    out += buf;
}

void write_csv(const Trace& trace, std::ostream& out) { out << to_csv(trace); }

std::string to_csv(const Trace& trace) {
    std::string out;
    out += "slot,W,Q,mu,loss,n_decreasing";
    const bool per_flow = trace.has_per_flow();
    if (per_flow)
        for (std::size_t i = 0; i < trace.slots.front().per_flow_windows.size(); ++i)
            out += ",w_" + std::to_string(i);
    out += "\n";
    for (const auto& s : trace.slots) {
        out += std::to_string(s.slot);
        out += ',';
        append_g6(out, s.aggregate_window);
        out += ',';
        append_g6(out, s.queue);
        out += ',';
        append_g6(out, s.utilization);
        out += ',';
        out += s.loss_event ? '1' : '0';
        out += ',';
        out += std::to_string(s.decreasing_flows.size());
        if (per_flow) {
            for (double w : s.per_flow_windows) {
                out += ',';
                append_g6(out, w);
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace bufsim::sim
