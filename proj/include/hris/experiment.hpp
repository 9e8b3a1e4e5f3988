#pragma once

#include "hris/agents.hpp"
#include "hris/config.hpp"
#include "hris/env.hpp"
#include "hris/replay.hpp"
#include "hris/security.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hris {

/// One line of the step log.
struct StepRecord {
    long t = 0;
    double reward = 0.0;
    double sum_rate = 0.0;
    Resolved mode = Resolved::passive;
    double energy_total = 0.0;
    double alpha = 1.0;
    double energy_j = 0.0;
    double cap = 0.0;
    double tx_power = 0.0;
    double penalty = 0.0;
};

nlohmann::json to_json(const StepRecord& r);
StepRecord step_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RewardPipelineRecord& r);

/// Environment + agent + reward pipeline + replay buffer for one seed.
class Trainer {
public:
    Trainer(const ExperimentSpec& spec, std::uint64_t seed);

    /// One interaction: act, step, poison/defend, store, learn.
    void step();

    long steps_done() const { return t_; }
    const std::vector<StepRecord>& records() const { return records_; }
    const std::vector<RewardPipelineRecord>& pipeline_records() const { return pipeline_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    HybridRisEnv& env() { return env_; }
    Agent& agent() { return *agent_; }
    const vec& observation() const { return obs_; }

    /// Greedy action for the current observation (no exploration, no state change beyond the agent RNG).
    vec greedy_action() { return agent_->act(obs_, true); }

    void save_checkpoint(const std::filesystem::path& path) const;
    void load_checkpoint(const std::filesystem::path& path);

private:
    ExperimentSpec spec_;
    std::uint64_t seed_;
    HybridRisEnv env_;
    std::unique_ptr<Agent> agent_;
    RewardPipeline pipeline_state_;
    ReplayBuffer buffer_;
    vec obs_;
    long t_ = 0;
    std::vector<StepRecord> records_;
    std::vector<RewardPipelineRecord> pipeline_;
};

struct RunSummary {
    std::string name;
    std::uint64_t seed = 0;
    long steps = 0;
    double converged_reward = 0.0;   // mean reward over the last 10% of steps
    double converged_sum_rate = 0.0; // mean sum rate over the last 10% of steps
    double mean_reward = 0.0;
    double mean_sum_rate = 0.0;
    double active_fraction = 0.0;
    double passive_fraction = 0.0;
    double mean_energy_j = 0.0;
    double mean_cap = 0.0;
    long violations = 0; // steps with tr(GG^H) > cap + 1e-9
    long discarded = 0;
    long triggered = 0;
    double wall_seconds = 0.0; // not part of the reproducible summary file
};

nlohmann::json to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);

RunSummary summarize(const std::string& name, std::uint64_t seed, const std::vector<StepRecord>& records,
                     const std::vector<RewardPipelineRecord>& pipeline);

/// Trailing moving average (shorter window at the start).
std::vector<double> moving_average(const std::vector<double>& xs, int window);

struct SeedResult {
    RunSummary summary;
    std::vector<double> curve; // moving-average reward
};

struct ExperimentResult {
    std::string name;
    std::vector<SeedResult> seeds;

    double mean_of(double RunSummary::*field) const;
    double std_of(double RunSummary::*field) const;
};

/// Runs one seed to completion; writes logs under `dir` when given.
SeedResult run_seed(const ExperimentSpec& spec, std::uint64_t seed, const std::filesystem::path* dir = nullptr);

/// Runs every (spec, seed) of the sweep in parallel workers and writes each spec's directory under `out`.
/// Pass an empty path to skip all file output.
std::vector<ExperimentResult> run(const ExperimentSpec& spec, const std::filesystem::path& out, int workers = 0);

/// Worker count from HRIS_WORKERS, else the hardware concurrency.
int default_workers();

class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ComparisonRow {
    std::string name;
    std::size_t seeds = 0;
    long steps = 0;
    double converged_mean = 0.0;
    double converged_std = 0.0;
    double sum_rate_mean = 0.0;
    double active_fraction = 0.0;
    double mean_energy_j = 0.0;
    double diff_vs_first = 0.0;      // paired mean of per-seed converged differences
    double diff_std = 0.0;
    double t_stat = 0.0;
    double energy_savings_vs_first = 0.0; // 1 - energy / first run's energy
};

/// Paired comparison against the first experiment. Requires identical seed lists and step counts.
std::vector<ComparisonRow> compare(const std::vector<ExperimentResult>& runs);

/// Loads an experiment directory written by run().
ExperimentResult load_experiment(const std::filesystem::path& dir);

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path);

/// Aligned mean moving-average curves, one column per experiment.
void write_curves_csv(const std::vector<ExperimentResult>& runs, const std::filesystem::path& path);

/// 1 - hybrid / active mean energy per step.
double energy_savings(double hybrid_energy, double active_energy);

} // namespace hris
