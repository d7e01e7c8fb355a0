#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "engine.hpp"

// Experiment configuration: a single JSON document describing one run plus
// optional sweep / search / verify sections. No environment state feeds into
// results; the seed lives in the document (a CLI flag may override it).

namespace bufsim::config {

// Schema violation with the offending field path, so the CLI can name it.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

struct SweepSpec {
    std::string parameter;       // dotted path into the config document
    std::vector<double> values;  // sorted ascending before execution
};

struct SearchSpec {
    double target = 1.0;
    double tolerance = 1.0;
    std::uint64_t window = 1;   // exact-minimum metric by default
    double percentile = 0.0;
};

struct VerifySpec {
    // theorem2..theorem5, lemma6, appendix_c
    std::vector<std::string> checks;
    std::uint64_t seeds = 10;
    std::uint64_t trials = 10000;
    double delta = 0.05;  // Theorem 5 failure probability
};

struct ExperimentConfig {
    sim::SimConfig sim{};
    std::optional<SweepSpec> sweep;
    std::optional<SearchSpec> search;
    std::optional<VerifySpec> verify;
};

sim::SimConfig parse_sim_config(const nlohmann::json& doc);
ExperimentConfig parse_experiment(const nlohmann::json& doc);
ExperimentConfig parse_experiment_text(const std::string& text);

// Effective-config echo embedded in every summary (keys are stable; nlohmann
// objects serialize sorted, so the echo is byte-deterministic).
nlohmann::json to_json(const sim::SimConfig& config);

// Set a sweep parameter by dotted path on a config document. Throws
// ConfigError for unknown paths.
void apply_parameter(nlohmann::json& doc, const std::string& path, double value);

}  // namespace bufsim::config
