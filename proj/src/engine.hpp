#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "algorithms.hpp"
#include "bounds.hpp"
#include "model.hpp"
#include "rng.hpp"

// RTT-slotted multi-flow simulator. One step advances every flow by one RTT:
// evaluate the queue/loss laws on the current aggregate, pick which flows see
// the congestion signal (the pluggable synchronization model), apply the
// per-flow transitions, clamp, and record telemetry.

namespace bufsim::sim {

enum class SyncKind {
    Minimal,            // just enough uniform-random flows to shrink the aggregate
    SqrtExtra,          // Minimal plus ceil(sqrt(n)) additional uniform-random flows
    FullySynchronized,  // every flow
    Bernoulli,          // each flow independently with probability p
    LargestFirst,       // the k largest windows
    // Mark a uniform-random ceil(mark_fraction*n) subset once Q >= threshold.
    // ECN mode models marking only; the buffer must sit far enough above the
    // threshold that drop-tail losses never engage.
    EcnThreshold,
};

struct SyncModel {
    SyncKind kind = SyncKind::FullySynchronized;
    double p = 0;              // Bernoulli
    std::uint64_t k = 0;       // LargestFirst
    double threshold = 0;      // EcnThreshold: marking starts at this queue depth
    double mark_fraction = 1;  // EcnThreshold

    static SyncModel minimal() { return {SyncKind::Minimal}; }
    static SyncModel sqrt_extra() { return {SyncKind::SqrtExtra}; }
    static SyncModel fully_synchronized() { return {SyncKind::FullySynchronized}; }
    static SyncModel bernoulli(double p);
    static SyncModel largest_first(std::uint64_t k);
    static SyncModel ecn_threshold(double threshold, double mark_fraction);

    bool is_ecn() const { return kind == SyncKind::EcnThreshold; }
    std::string name() const;
};

struct SimConfig {
    model::LinkConfig link{};
    std::uint64_t n_flows = 1;
    cc::AlgorithmKind algorithm{};
    SyncModel sync{};
    std::uint64_t duration = 1000;  // slots
    std::uint64_t seed = 1;
    std::optional<bounds::FairnessBand> fairness_clamp;  // enforced in theorem mode
    bool theorem_mode = false;  // window floor 2 and band clamp
    bool record_per_flow = false;

    void validate() const;
    double window_floor() const { return theorem_mode ? 2.0 : 1.0; }
};

struct SlotTelemetry {
    std::uint64_t slot = 0;
    double aggregate_window = 0;  // W(t)
    double queue = 0;             // Q(t)
    double utilization = 0;       // mu(t)
    bool loss_event = false;      // loss or mark predicate held this slot
    std::vector<std::uint32_t> decreasing_flows;  // D(t), sorted
    std::vector<double> per_flow_windows;         // only when requested
    bool floor_clamped = false;  // some window was pulled up to the floor
};

struct Trace {
    SimConfig config{};
    std::vector<SlotTelemetry> slots;

    bool has_per_flow() const {
        return !slots.empty() && !slots.front().per_flow_windows.empty();
    }
};

// Which flows receive the congestion signal this slot. Preconditions: the
// loss predicate held (drop models) or the queue reached the mark threshold
// (ECN). Minimal takes the fewest uniformly-chosen flows whose give-back
// outweighs the others' growth (never more than ceil(n/(1 + w_min/2)));
// window_floor is the engine's clamp, which caps how far a flow can drop.
// Throws std::invalid_argument on an empty flow vector.
std::vector<std::uint32_t> allocate_congestion(const SyncModel& sync,
                                               const std::vector<cc::FlowState>& flows,
                                               const model::AggregateState& state,
                                               Rng& rng, double window_floor = 1.0);

// Live simulation state for stepping manually; run() drives it to completion.
class Simulation {
  public:
    explicit Simulation(const SimConfig& config);

    // Advance one slot. The returned record snapshots the state at the start
    // of the slot plus the congestion decisions taken during it.
    SlotTelemetry step();

    const std::vector<cc::FlowState>& flows() const { return flows_; }
    std::uint64_t slot() const { return slot_; }

  private:
    SimConfig config_;
    std::vector<cc::FlowState> flows_;
    std::uint64_t slot_ = 0;
    Rng sync_rng_;
    Rng flow_rng_;
};

// Run to completion: exactly config.duration telemetry records, bit-identical
// across invocations with the same config.
Trace run(const SimConfig& config);

// Trace CSV: header "slot,W,Q,mu,loss,n_decreasing[,w_0,...]", floats with
// six significant digits.
void write_csv(const Trace& trace, std::ostream& out);
std::string to_csv(const Trace& trace);

}  // namespace bufsim::sim
