#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "config.hpp"

// Experiment orchestration shared by the C API and tests: summary assembly,
// sweep execution, and the theorem-verification suite.

namespace bufsim::experiment {

inline constexpr const char* kToolVersion = "1.0.0";

// Summary JSON for one run: config echo, measured fairness, utilization
// percentiles, queue histogram, and any theorem reports. Keys are stable.
nlohmann::json summarize(const sim::Trace& trace,
                         const std::vector<analysis::VerificationReport>& reports = {},
                         std::optional<double> min_buffer = {});

nlohmann::json report_json(const analysis::VerificationReport& report);
nlohmann::json monte_carlo_json(const analysis::MonteCarloResult& result);

struct SweepPoint {
    double value = 0;
    bool ok = false;
    std::string error;
    nlohmann::json summary;
};

struct SweepOutcome {
    std::string parameter;
    std::vector<SweepPoint> points;  // sorted by parameter value
    bool all_ok = true;
};

// One run (plus optional min-buffer search) per sweep value. Points execute
// independently (optionally in parallel; results merge by index, so the
// outcome does not depend on scheduling); a failing point is recorded and
// the rest still run.
SweepOutcome run_sweep(const nlohmann::json& base_doc,
                       const config::ExperimentConfig& exp, unsigned jobs = 1);

struct VerifyEntry {
    std::string id;
    bool pass = false;
    bool premises_never_held = false;
    std::string detail;
    nlohmann::json data;
};

struct VerifyOutcome {
    std::vector<VerifyEntry> entries;
    bool all_pass = false;
};

// Default suite: the window-floor theorems on capped-synchronization runs,
// the two Monte Carlo bounds, and the decrease-condition trace scan.
VerifyOutcome verify_default_suite(std::uint64_t seed);

// User-configured verification: runs the named theorems against the config's
// simulation (trace checks use `seeds` consecutive seeds; Monte Carlo checks
// take n/bdp/band/delta from the config).
VerifyOutcome verify_with_config(const config::ExperimentConfig& exp);

nlohmann::json verify_json(const VerifyOutcome& outcome);

}  // namespace bufsim::experiment
