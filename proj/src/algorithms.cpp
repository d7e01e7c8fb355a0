#include "algorithms.hpp"

namespace bufsim::cc {

AlgorithmKind AlgorithmKind::md(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("AlgorithmKind: beta must be in (0, 1)");
    return {Algo::MultiplicativeDecrease, beta};
}

double AlgorithmKind::decrease_factor() const {
    switch (algo) {
        case Algo::Reno:
        case Algo::RandomizedReno: return 0.5;
        case Algo::MultiplicativeDecrease: return beta;
        case Algo::Cubic: return 717.0 / 1024.0;
        case Algo::Scalable: return 7.0 / 8.0;
        default:
            throw std::logic_error("decrease_factor: not a multiplicative-decrease kind");
    }
}

std::string AlgorithmKind::name() const {
    switch (algo) {
        case Algo::Reno: return "reno";
        case Algo::MultiplicativeDecrease: return "md";
        case Algo::Cubic: return "cubic";
        case Algo::Scalable: return "scalable";
        case Algo::BbrCycle: return "bbr_cycle";
        case Algo::BbrIncrement: return "bbr_increment";
        case Algo::RandomizedReno: return "randomized_reno";
    }
    return "unknown";
}

FlowState increase(const FlowState& flow) {
    FlowState next = flow;
    switch (flow.algorithm.algo) {
        case Algo::Reno:
        case Algo::MultiplicativeDecrease:
        case Algo::Cubic:
        case Algo::RandomizedReno:
            next.window += 1.0;
            break;
        case Algo::Scalable:
            // 0.01 per ack, compounded once per RTT.
            next.window *= 1.01;
            break;
        case Algo::BbrCycle:
        case Algo::BbrIncrement:
            break;
    }
    return next;
}

static void require_rng(const FlowState& flow, const Rng* rng) {
    if (flow.algorithm.needs_rng() && rng == nullptr)
        throw std::invalid_argument("decrease: " + flow.algorithm.name() +
                                    " requires a random source");
}

FlowState decrease(const FlowState& flow, Rng* rng) {
    require_rng(flow, rng);
    FlowState next = flow;
    switch (flow.algorithm.algo) {
        case Algo::Reno:
        case Algo::MultiplicativeDecrease:
        case Algo::Cubic:
        case Algo::Scalable:
            next.window *= flow.algorithm.decrease_factor();
            break;
        case Algo::RandomizedReno:
            if (rng->uniform() < 1.0 / flow.window) next.window *= 0.5;
            break;
        case Algo::BbrCycle:
            if (flow.bbr_phase == kProbePhase) next.bbr_loss_pending = true;
            break;
        case Algo::BbrIncrement: {
            std::uint64_t die = rng->below(8);
            if (die == 0) next.window -= flow.bbr_base / 4.0;
            else if (die == 1) next.window += flow.bbr_base / 4.0;
            break;
        }
    }
    return next;
}

FlowState advance_bbr(const FlowState& flow, bool saw_loss, Rng* rng) {
    if (!flow.algorithm.is_bbr())
        throw std::invalid_argument("advance_bbr: flow is not a BBR kind");
    require_rng(flow, rng);

    if (flow.algorithm.algo == Algo::BbrIncrement) {
        FlowState next = flow;
        next.bbr_loss_pending = false;
        if (saw_loss) {
            std::uint64_t die = rng->below(8);
            if (die == 0) next.window -= flow.bbr_base / 4.0;
            else if (die == 1) next.window += flow.bbr_base / 4.0;
        }
        return next;
    }

    FlowState next = flow;
    next.bbr_loss_pending = false;
    next.bbr_phase = (flow.bbr_phase + 1) % static_cast<int>(kGainCycle.size());
    if (next.bbr_phase == kProbePhase) {
        next.window = flow.window + flow.bbr_base / 4.0;
    } else if (next.bbr_phase == kDrainPhase) {
        next.window = flow.window - flow.bbr_base / 4.0;
    } else {
        next.window = flow.bbr_base;
    }
    (void)saw_loss;  // the probe-slot loss is realized by the cap + drain slot
    return next;
}

int random_initial_phase(Rng& rng) {
    int p = static_cast<int>(rng.below(kGainCycle.size() - 1));
    return p >= kDrainPhase ? p + 1 : p;
}

}  // namespace bufsim::cc
