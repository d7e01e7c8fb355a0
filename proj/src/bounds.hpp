#pragma once

#include <stdexcept>
#include <string>

#include "algorithms.hpp"

// Closed-form buffer-size and utilization calculators. Everything here is a
// pure total function over its stated domain; results are real-valued
// packets, rounding up is the caller's job.

namespace bufsim::bounds {

// Multiplicative fairness band: delta_lo * bdp/n <= w_i(t) <= delta_hi * bdp/n.
struct FairnessBand {
    double delta_lo = 1.0;
    double delta_hi = 1.0;

    void validate() const {
        if (!(delta_lo > 0) || !(delta_lo <= delta_hi))
            throw std::domain_error("FairnessBand: need 0 < delta_lo <= delta_hi");
    }
};

// Smallest buffer for a single flow to sustain utilization gamma. Closed
// forms per family: Reno (2g-1)*bdp, decrease-by-beta (g/beta - 1)*bdp,
// Cubic (10g/7 - 1)*bdp, Scalable (8g/7 - 1)*bdp, BBR probe cycle
// (g - 3/4)*bdp, each clamped at zero (targets below the zero-buffer floor
// need no buffer at all).
double single_flow_min_buffer(const cc::AlgorithmKind& kind, double bdp, double gamma);

// Buffer sufficient for full utilization with n desynchronized almost-fair
// flows: delta_hi * bdp / sqrt(n).
double sqrt_n_buffer(const FairnessBand& band, double bdp, double n);

// Worst-case instantaneous utilization with any buffer size:
// max(0, 1 - delta_hi / sqrt(n)).
double utilization_floor(const FairnessBand& band, double n);

// Buffer making P(mu < 1) <= delta for n almost-fair BBR flows probing for
// bandwidth: delta_hi * bdp * sqrt(ln(1/delta)) / sqrt(2n).
double bbr_buffer(const FairnessBand& band, double bdp, double n, double delta);

// Aggregate-window floor when at most (must-decrease minimum + s) flows see
// each loss: bdp + buffer - s * delta_hi * bdp / n.
double desync_window_floor(const FairnessBand& band, double bdp, double buffer,
                           double n, double extra_flows);

// Minimum number of flows that must decrease for the aggregate window to
// drop: ceil(n / (1 + w_min/2)). Requires w_min >= 2.
double min_decreasing_flows(double n, double w_min);

struct TailBound {
    double threshold = 0;
    double probability = 0;
};

// Tail bound on the number of flows decreasing in one RTT when each flow
// independently halves with probability p <= n/(delta_lo * bdp):
// P(D > n^2/(delta_lo * bdp) + sqrt(n)) <= exp(-1/2).
TailBound bernoulli_sync_tail(const FairnessBand& band, double bdp, double n);

// Generalized variant: threshold n^2/(delta_lo * bdp) + sqrt(2 n ln(1/delta))
// holds with probability at least 1 - delta.
double bernoulli_sync_threshold(const FairnessBand& band, double bdp, double n,
                                double delta);

// Buffer so that random per-flow loss with probability p empties the queue
// with probability at most delta:
// (delta_hi/2) * bdp * p * (1 + sqrt(2 ln(1/delta) / (n p))).
double random_loss_buffer(const FairnessBand& band, double bdp, double p,
                          double n, double delta);

struct WindowFloor {
    double floor = 0;        // aggregate-window lower bound, clamped at 0
    double premise_cap = 0;  // stated cap on decreasing flows: n^2/(dhi*bdp) + sqrt(n)
};

// Aggregate-window floor bdp + buffer - delta_hi*bdp/sqrt(n), together with
// the stated premise cap on the number of decreasing flows.
WindowFloor theorem2_window_floor(const FairnessBand& band, double bdp,
                                  double buffer, double n);

// Largest per-event decreasing-flow count for which the window-floor
// argument still closes: (n + sqrt(n) * w+) / (1 + w+/2) with
// w+ = delta_hi*bdp/n. The premise_cap above loosens (1 + w+/2) to w+,
// which makes it stricter than necessary; the verifier gates on this
// exact form.
double theorem2_event_cap(const FairnessBand& band, double bdp, double n);

}  // namespace bufsim::bounds
