#pragma once

#include "hris/numerics.hpp"
#include "hris/serialize.hpp"

#include <deque>
#include <optional>
#include <string>

namespace hris {

enum class AttackKind { invert, scale, random_scale };

/// Adaptive reward poisoning, triggered while the victim's recent rewards exceed `threshold`.
struct AttackConfig {
    AttackKind kind = AttackKind::invert;
    double scale = 0.5;      // S_C, scale attack
    double low = 0.3;        // random_scale bounds
    double high = 0.9;
    double threshold = 0.5;  // A_T
    int trigger_window = 50;

    void validate() const;
};

struct DefenseConfig {
    double r_min = -2.0;
    double r_max = 2.0;
    double chi = 2.0;
    int warmup_count = 10; // w_p
    int stats_window = 500;

    void validate() const;
};

enum class Decision { accepted, discarded };

struct RewardPipelineRecord {
    long t = 0;
    double raw = 0.0;
    double post_attack = 0.0;
    double clipped = 0.0;
    Decision decision = Decision::accepted;
    double mean = 0.0; // statistics the filter compared against
    double std = 0.0;
    bool triggered = false;

    /// Value handed to the learner; only meaningful when accepted.
    double value() const { return clipped; }
};

/// Applies the attack if `recent_mean` exceeds the threshold; otherwise returns `r`.
double attack(const AttackConfig& cfg, double r, double recent_mean, Rng& rng);

/// Mean and unbiased standard deviation (floored at 1e-6) over the most recent accepted rewards.
class RewardStats {
public:
    explicit RewardStats(int window = 500) : window_(window) {}

    void push(double r);
    std::size_t count() const { return values_.size(); }
    double mean() const;
    double std() const;

    const std::deque<double>& values() const { return values_; }
    void assign(std::deque<double> v) { values_ = std::move(v); }

private:
    int window_;
    std::deque<double> values_;
};

struct DefenseOutcome {
    Decision decision = Decision::accepted;
    double clipped = 0.0;
};

/// Clip then filter against |r - mean| <= chi * std. Accepted values update `stats`.
/// While fewer than warmup_count rewards have been accepted, every reward is accepted.
DefenseOutcome defend(const DefenseConfig& cfg, RewardStats& stats, double r);

/// attack -> clip -> filter, with per-run state (trigger window, filter statistics, attack RNG).
class RewardPipeline {
public:
    RewardPipeline(std::optional<AttackConfig> attack, std::optional<DefenseConfig> defense, Rng rng);

    RewardPipelineRecord step(long t, double raw);

    bool attack_enabled() const { return attack_.has_value(); }
    bool defense_enabled() const { return defense_.has_value(); }
    const RewardStats& stats() const { return stats_; }

    void save(BinaryWriter& w) const;
    void load(BinaryReader& r);

private:
    std::optional<AttackConfig> attack_;
    std::optional<DefenseConfig> defense_;
    Rng rng_;
    RewardStats stats_;
    std::deque<double> recent_raw_;
    long seen_ = 0;
};

std::string to_string(Decision d);
AttackKind parse_attack_kind(const std::string& name);
std::string to_string(AttackKind kind);

} // namespace hris
