#include "hris/security.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hris {

void AttackConfig::validate() const
{
    if (kind == AttackKind::scale && !(scale > 0.0 && scale < 1.0)) {
        throw DomainError("attack.scale must lie in (0, 1)");
    }
    if (kind == AttackKind::random_scale && !(low > 0.0 && low < high && high < 1.0)) {
        throw DomainError("attack.low/high must satisfy 0 < low < high < 1");
    }
    if (trigger_window < 1) throw DomainError("attack.trigger_window must be >= 1");
}

void DefenseConfig::validate() const
{
    if (!(r_min < r_max)) throw DomainError("defense.r_min must be < r_max");
    if (!(chi > 0.0)) throw DomainError("defense.chi must be > 0");
    if (warmup_count < 2) throw DomainError("defense.warmup_count must be >= 2");
    if (stats_window < warmup_count) throw DomainError("defense.stats_window must be >= warmup_count");
}

double attack(const AttackConfig& cfg, double r, double recent_mean, Rng& rng)
{
    if (!(recent_mean > cfg.threshold)) return r;
    switch (cfg.kind) {
    case AttackKind::invert: return -r;
    case AttackKind::scale: return cfg.scale * r;
    case AttackKind::random_scale: return rng.uniform(cfg.low, cfg.high) * r;
    }
    return r;
}

void RewardStats::push(double r)
{
    values_.push_back(r);
    while (values_.size() > static_cast<std::size_t>(window_)) values_.pop_front();
}

double RewardStats::mean() const
{
    if (values_.empty()) return 0.0;
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double RewardStats::std() const
{
    constexpr double floor = 1e-6;
    if (values_.size() < 2) return floor;
    const double mu = mean();
    double ss = 0.0;
    for (double v : values_) ss += (v - mu) * (v - mu);
    return std::max(std::sqrt(ss / static_cast<double>(values_.size() - 1)), floor);
}

DefenseOutcome defend(const DefenseConfig& cfg, RewardStats& stats, double r)
{
    DefenseOutcome out;
    out.clipped = std::clamp(r, cfg.r_min, cfg.r_max);
    const bool warming = stats.count() < static_cast<std::size_t>(cfg.warmup_count);
    if (warming || std::abs(out.clipped - stats.mean()) <= cfg.chi * stats.std()) {
        out.decision = Decision::accepted;
        stats.push(out.clipped);
    } else {
        out.decision = Decision::discarded;
    }
    return out;
}

RewardPipeline::RewardPipeline(std::optional<AttackConfig> attack, std::optional<DefenseConfig> defense, Rng rng)
    : attack_(std::move(attack)), defense_(std::move(defense)), rng_(rng),
      stats_(defense_ ? defense_->stats_window : 1)
{
    if (attack_) attack_->validate();
    if (defense_) defense_->validate();
}

RewardPipelineRecord RewardPipeline::step(long t, double raw)
{
    RewardPipelineRecord rec;
    rec.t = t;
    rec.raw = raw;
    rec.post_attack = raw;

    if (attack_) {
        const bool warm = defense_ && seen_ < defense_->warmup_count;
        const bool history = recent_raw_.size() >= static_cast<std::size_t>(attack_->trigger_window);
        if (!warm && history) {
            const double recent =
                std::accumulate(recent_raw_.begin(), recent_raw_.end(), 0.0) / static_cast<double>(recent_raw_.size());
            rec.triggered = recent > attack_->threshold;
            rec.post_attack = attack(*attack_, raw, recent, rng_);
        }
        recent_raw_.push_back(raw);
        while (recent_raw_.size() > static_cast<std::size_t>(attack_->trigger_window)) recent_raw_.pop_front();
    }

    if (defense_) {
        rec.mean = stats_.mean();
        rec.std = stats_.std();
        const DefenseOutcome d = defend(*defense_, stats_, rec.post_attack);
        rec.clipped = d.clipped;
        rec.decision = d.decision;
    } else {
        rec.clipped = rec.post_attack;
        rec.decision = Decision::accepted;
    }
    ++seen_;
    return rec;
}

void RewardPipeline::save(BinaryWriter& w) const
{
    w.str("pipeline");
    w.rng(rng_.state());
    w.i64(seen_);
    w.doubles({stats_.values().begin(), stats_.values().end()});
    w.doubles({recent_raw_.begin(), recent_raw_.end()});
}

void RewardPipeline::load(BinaryReader& r)
{
    r.expect("pipeline");
    rng_.set_state(r.rng());
    seen_ = r.i64();
    const auto stats = r.doubles();
    stats_.assign({stats.begin(), stats.end()});
    const auto recent = r.doubles();
    recent_raw_.assign(recent.begin(), recent.end());
}

std::string to_string(Decision d)
{
    return d == Decision::accepted ? "accepted" : "discarded";
}

AttackKind parse_attack_kind(const std::string& name)
{
    if (name == "invert") return AttackKind::invert;
    if (name == "scale") return AttackKind::scale;
    if (name == "random_scale") return AttackKind::random_scale;
    throw DomainError("unknown attack kind '" + name + "' (expected invert, scale or random_scale)");
}

std::string to_string(AttackKind kind)
{
    switch (kind) {
    case AttackKind::invert: return "invert";
    case AttackKind::scale: return "scale";
    case AttackKind::random_scale: return "random_scale";
    }
    return "unknown";
}

} // namespace hris
