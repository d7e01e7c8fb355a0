#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "engine.hpp"

// Trace post-processing and theorem verification: fairness-band measurement,
// queue-depth distributions, sliding-window utilization percentiles,
// minimum-buffer search, and Monte Carlo checks of the probabilistic bounds.

namespace bufsim::analysis {

// Fairness band observed in a trace: 1st/99th percentile of all recorded
// per-flow windows (pooled over flows and slots), expressed as multipliers
// of bdp/n. Throws std::invalid_argument if per-flow windows were not
// recorded.
bounds::FairnessBand measure_fairness(const sim::Trace& trace, double bdp,
                                      double n);
bounds::FairnessBand measure_fairness(const sim::Trace& trace);

struct Histogram {
    std::vector<double> edges;   // bins + 1, strictly increasing
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    // Predicted required buffer delta_hi*bdp/sqrt(n); the queue should stay
    // within this distance of full. Set when a band is supplied.
    std::optional<double> predicted_min_buffer;
};

// Distribution of Q(t) over the trace, bins equal-width over [0, buffer].
Histogram queue_histogram(const sim::Trace& trace, std::uint64_t bins,
                          const std::optional<bounds::FairnessBand>& band = {});

struct FlowsPerLoss {
    std::vector<std::uint64_t> per_event;  // |D(t)| at each signal slot
    double mean = 0;
    // Comparison against the stated cap n^2/(delta_hi*bdp) + sqrt(n).
    std::optional<double> stated_cap;
    std::uint64_t events_over_stated_cap = 0;
};

FlowsPerLoss flows_per_loss(const sim::Trace& trace,
                            const std::optional<bounds::FairnessBand>& band = {});

// Percentile (nearest-rank; 0 selects the minimum) of the sliding-window
// mean of mu(t). Throws std::domain_error if window is 0 or exceeds the
// trace length.
double min_utilization(const sim::Trace& trace, std::uint64_t window = 10,
                       double percentile = 0.01);

struct SearchResult {
    bool satisfiable = false;
    double buffer = 0;      // smallest passing buffer found
    double bracket_lo = 0;  // largest failing probe (0 if none failed)
    double bracket_hi = 0;  // equals buffer when satisfiable
    bool monotone = true;   // three-point monotonicity probe outcome
};

// Binary search over buffer in [0, 2*bdp] for the smallest buffer whose
// min_utilization reaches target, to within tolerance packets. The default
// metric is the exact trace minimum; pass (10, 0.01) for the smoothed
// percentile procedure. Monotonicity of utilization in the buffer is probed
// empirically, not assumed.
SearchResult search_min_buffer(const sim::SimConfig& config_template,
                               double target, double tolerance = 1.0,
                               std::uint64_t window = 1,
                               double percentile = 0.0);

enum class TheoremId {
    Theorem2,   // aggregate-window floor under capped synchronization
    Theorem3,   // full utilization when B >= delta_hi*bdp/sqrt(n)
    Theorem4,   // utilization floor 1 - delta_hi/sqrt(n)
    Theorem5,   // BBR probabilistic utilization bound
    AppendixC,  // enough decreasing flows implies the aggregate shrinks
};

std::string theorem_name(TheoremId id);
std::optional<TheoremId> theorem_from_name(const std::string& name);

struct VerificationReport {
    TheoremId theorem = TheoremId::Theorem2;
    bool premises_ever_held = false;
    std::uint64_t premise_slots = 0;  // slots where all premises held
    std::uint64_t checked_slots = 0;  // premise slots where the conclusion applies
    std::uint64_t violations = 0;
    std::vector<std::uint64_t> violation_slots;  // first few, for diagnostics
    double margin = 0;  // worst-case slack (packets or utilization)
    bool pass = false;  // premises held somewhere and no violation
    std::string note;
};

// Per-slot premise/conclusion check of one theorem against a trace.
//
// Premises per slot: every flow inside the band, every window >= 2, and --
// for the window-floor checks -- the loss event anchoring the current
// epoch involved no more decreasing flows than the floor argument
// tolerates (theorem2_event_cap). Conclusions are only asserted on slots
// whose premises held; slots before the first loss event are out of scope.
VerificationReport verify_theorem(const sim::Trace& trace, TheoremId id,
                                  const bounds::FairnessBand& band);

enum class MonteCarloCheck {
    Theorem5,  // worst-case-loss slot for BBR increments
    Lemma6,    // Bernoulli synchronization tail
};

struct MonteCarloParams {
    double n = 100;
    double bdp = 1000;
    bounds::FairnessBand band{};
    double delta = 0.05;          // Theorem 5 failure probability
    std::optional<double> p;      // Lemma 6 per-flow probability; default n/(delta_lo*bdp)
};

struct MonteCarloResult {
    std::string check;
    std::uint64_t trials = 0;
    double empirical = 0;
    double bound = 0;
    double margin = 0;  // 3*sqrt(bound/trials)
    bool pass = false;
    double threshold = 0;  // event threshold (Lemma 6) or buffer (Theorem 5)
};

// Repeats the randomized single-slot experiment behind a probabilistic bound
// with independent seeded trials and compares the empirical frequency to the
// bound (pass if empirical <= bound + 3*sqrt(bound/trials)).
MonteCarloResult monte_carlo_bound(MonteCarloCheck check,
                                   const MonteCarloParams& params,
                                   std::uint64_t trials, std::uint64_t seed);

}  // namespace bufsim::analysis
