#pragma once

#include "hris/agents.hpp"
#include "hris/env.hpp"
#include "hris/security.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hris {

/// Thrown by config loading; `errors` lists every offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

struct OutputOptions {
    bool step_log = true;
    bool pipeline_log = true;
    bool checkpoint = true;
};

struct SweepAxis {
    std::string path; // JSON pointer into the config, e.g. /env/harvest/threshold_j
    std::vector<nlohmann::json> values;
};

struct ExperimentSpec {
    std::string name = "experiment";
    EnvConfig env;
    AgentKind agent = AgentKind::sac;
    SacConfig sac;
    BaselineConfig baseline;
    std::optional<AttackConfig> attack;
    std::optional<DefenseConfig> defense;
    std::vector<std::uint64_t> seeds;
    long total_steps = 20000;
    int moving_average_window = 200;
    OutputOptions output;
    std::vector<SweepAxis> sweep;

    /// Fully merged configuration this spec was parsed from.
    nlohmann::json source;
};

/// Every default, including the published simulation parameters (dB values as given).
nlohmann::json default_config();

/// Merges `user` over the defaults, validates, and parses. Sweep axes are kept, not expanded.
ExperimentSpec parse_spec(const nlohmann::json& user);

ExperimentSpec load_spec(const std::string& path);

/// One spec per point of the sweep's cartesian product (the spec itself when there is no sweep).
std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec);

/// Convenience: patch a parsed spec's source JSON and re-parse.
ExperimentSpec with_overrides(const ExperimentSpec& spec, const nlohmann::json& patch);

} // namespace hris
