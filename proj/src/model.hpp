#pragma once

#include <stdexcept>

// Fluid-model laws for a drop-tail bottleneck at RTT granularity: the
// queue-occupancy map, the loss predicate, and the utilization law. Time is
// measured in RTT slots and capacity in packets per RTT, so the BDP equals
// the capacity numerically and all quantities are plain packet counts.

namespace bufsim::model {

struct LinkConfig {
    double bdp = 0;     // packets per RTT (= capacity, RTT being the time unit)
    double buffer = 0;  // maximum queue length B, packets

    void validate() const {
        if (!(bdp > 0)) throw std::domain_error("LinkConfig: bdp must be > 0");
        if (!(buffer >= 0)) throw std::domain_error("LinkConfig: buffer must be >= 0");
    }
};

struct AggregateState {
    double inflight = 0;     // W(t)
    double queue = 0;        // Q(t)
    double utilization = 0;  // mu(t), in [0, 1]
};

// Standing queue as a function of in-flight packets: empty below one BDP,
// grows one-for-one up to the buffer limit, then saturates.
double queue_occupancy(double inflight, const LinkConfig& link);

// True iff the queue is full, i.e. inflight >= bdp + buffer.
bool loss_predicate(double inflight, const LinkConfig& link);

// min(inflight / bdp, 1). A work-conserving queue is fully utilized exactly
// when it is non-empty.
double utilization(double inflight, const LinkConfig& link);

// Convenience: all three laws applied to one in-flight value.
AggregateState aggregate_state(double inflight, const LinkConfig& link);

}  // namespace bufsim::model
