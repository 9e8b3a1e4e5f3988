#pragma once

#include "hris/channel.hpp"
#include "hris/phy.hpp"
#include "hris/ris.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hris {

struct EnvConfig {
    Topology topo;
    CascadeSpec cascade;
    PassiveParams passive;
    ActiveParams active;
    HarvestParams harvest;
    ConsumptionParams consumption;
    NoiseParams noise;
    PowerConstraint power;
    RisMode mode;
    double penalty_weight = 0.1;
    FadingMode fading;
    /// Divide the P_t / I fields by their configured values and the previous
    /// beamformer by sqrt(P_t), keeping network inputs O(1).
    bool normalize_observation = true;

    void validate() const;
};

/// Observation layout, all complex entries as interleaved (re, im) pairs in row-major order:
///
///   [0]        P_t
///   [1]        I
///   H_s        R x A
///   h_b        B blocks of R
///   H_p        A x W
///   G(t-1)     A x B
///   eps(t-1)   R phases
///   alpha(t-1) 1 when passive, 0 before the first step
///   mode(t-1)  1 active, 0 passive
std::size_t observation_size(const Topology& topo);

/// Action layout: 2AB beamformer reals (re, im interleaved, row-major A x B), then R phase reals.
std::size_t action_size(const Topology& topo);

struct DecodedAction {
    cmat beamformer;
    std::vector<double> phases;
};

/// Beamformer block times `beam_scale`, projected onto the power cap; phases mapped (x+1)pi and wrapped.
DecodedAction decode_action(std::span<const double> action, double cap, const Topology& topo,
                            double beam_scale = 1.0);

/// Inverse of the phase map, for driving the environment with known phases.
double phase_to_action(double eps);

struct StepInfo {
    double sum_rate = 0.0;
    Resolved resolved = Resolved::passive;
    double energy_total = 0.0;
    double alpha = 1.0;
    double energy_consumed = 0.0;
    double cap = 0.0;
    double penalty = 0.0;
    double tx_power = 0.0; // tr(GG^H) after projection
};

struct StepOutcome {
    vec observation;
    double reward = 0.0;
    StepInfo info;
};

/// Serializable environment state (everything needed to resume mid-run).
struct EnvSnapshot {
    Rng::State rng;
    long step = 0;
    ChannelSet channels;
    cmat prev_beamformer;
    std::vector<double> prev_phases;
    double prev_alpha = 0.0;
    double prev_mode = 0.0;
};

/// Non-episodic hybrid-RIS underlay environment.
///
/// The observation returned by reset()/step() carries the channels the next
/// action will be applied to. A step harvests, resolves the mode, decodes the
/// action under the PU cap, evaluates the rates, then advances the channels.
class HybridRisEnv {
public:
    explicit HybridRisEnv(EnvConfig cfg);

    vec reset(std::uint64_t seed);
    StepOutcome step(std::span<const double> action);
    StepOutcome step(const vec& action) { return step(std::span<const double>(action.data(), static_cast<std::size_t>(action.size()))); }

    std::size_t observation_size() const { return hris::observation_size(cfg_.topo); }
    std::size_t action_size() const { return hris::action_size(cfg_.topo); }

    /// Scale applied to the beamformer block: sqrt(P_t / AB), so |a| <= 1 can reach full power.
    double beam_scale() const;

    const EnvConfig& config() const { return cfg_; }
    const ChannelSet& channels() const { return channels_; }
    long steps_taken() const { return step_; }

    EnvSnapshot snapshot() const;
    void restore(const EnvSnapshot& s);

private:
    vec observe() const;

    EnvConfig cfg_;
    Rng rng_;
    long step_ = 0;
    ChannelSet channels_;
    cmat prev_beamformer_;
    std::vector<double> prev_phases_;
    double prev_alpha_ = 0.0;
    double prev_mode_ = 0.0;
};

} // namespace hris
