#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "rng.hpp"

// Per-flow congestion-control state machines: the increase-on-ack and
// decrease-on-congestion rules for each algorithm family. Windows are
// real-valued packet counts; rounding happens only at reporting boundaries.

namespace bufsim::cc {

enum class Algo {
    Reno,                    // +1 per RTT, halve on signal
    MultiplicativeDecrease,  // +1 per RTT, w *= beta on signal
    Cubic,                   // MD with beta = 717/1024 (Linux constant)
    Scalable,                // *1.01 per RTT, w *= 7/8 on signal
    BbrCycle,                // 8-slot pacing-gain cycle, single-flow loss rule
    BbrIncrement,            // +-(base/4) random increment on loss (multi-flow rule)
    RandomizedReno,          // halve with probability 1/w on signal
};

struct AlgorithmKind {
    Algo algo = Algo::Reno;
    double beta = 0.5;  // decrease factor, only meaningful for MD kinds

    static AlgorithmKind reno() { return {Algo::Reno, 0.5}; }
    static AlgorithmKind md(double beta);
    static AlgorithmKind cubic() { return {Algo::Cubic, 717.0 / 1024.0}; }
    static AlgorithmKind scalable() { return {Algo::Scalable, 7.0 / 8.0}; }
    static AlgorithmKind bbr_cycle() { return {Algo::BbrCycle, 0.0}; }
    static AlgorithmKind bbr_increment() { return {Algo::BbrIncrement, 0.0}; }
    static AlgorithmKind randomized_reno() { return {Algo::RandomizedReno, 0.5}; }

    bool is_bbr() const { return algo == Algo::BbrCycle || algo == Algo::BbrIncrement; }
    bool needs_rng() const { return is_bbr() || algo == Algo::RandomizedReno; }

    // Window fraction retained after a congestion signal (MD kinds only).
    double decrease_factor() const;

    std::string name() const;
};

// The fixed probe-bandwidth pacing-gain cycle: one probe slot at 5/4, one
// drain slot at 3/4, six cruise slots at 1. Gains sum to 8, so a full cycle
// is rate-neutral.
inline constexpr std::array<double, 8> kGainCycle = {5.0 / 4.0, 3.0 / 4.0, 1, 1,
                                                     1, 1, 1, 1};
inline constexpr int kProbePhase = 0;
inline constexpr int kDrainPhase = 1;

struct FlowState {
    double window = 0;          // w_i(t), in-flight packets
    AlgorithmKind algorithm{};
    int bbr_phase = 2;          // position in the gain cycle (BbrCycle only)
    double bbr_base = 0;        // R_i * RTT, packets per RTT (BBR kinds only)
    bool bbr_loss_pending = false;  // probe-phase loss waiting for the next advance
};

// Ack-clocked growth for one RTT with no congestion signal. BBR kinds are
// untouched here; their windows move in advance_bbr.
FlowState increase(const FlowState& flow);

// Response to a congestion signal. rng may be null for deterministic kinds;
// RandomizedReno and BBR kinds throw std::invalid_argument without one.
// RandomizedReno uses the window at the instant of signal receipt for its
// 1/w coin. BbrCycle only reacts if currently in the probe phase.
FlowState decrease(const FlowState& flow, Rng* rng);

// Advance a BBR flow by one slot.
//
// BbrCycle: steps the gain cycle. Entering the probe slot raises the window
// by base/4; leaving it (into the drain slot) lowers it by base/4; cruise
// slots reset to base (the ACK clock refills the pipe). A loss seen in the
// probe slot does not change the schedule -- the drain slot is the post-loss
// rate reduction -- but the engine caps the probe window at bdp + buffer
// first, which is what makes the post-loss window depend on the buffer.
//
// BbrIncrement: on saw_loss the window moves by -base/4, +base/4, or 0 with
// probabilities 1/8, 1/8, 6/8; otherwise it is unchanged.
FlowState advance_bbr(const FlowState& flow, bool saw_loss, Rng* rng);

// Initial probe-cycle position: uniform over the seven non-drain slots.
int random_initial_phase(Rng& rng);

}  // namespace bufsim::cc
