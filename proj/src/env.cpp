#include "hris/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hris {

void EnvConfig::validate() const
{
    topo.validate();
    cascade.validate();
    passive.validate();
    active.validate();
    harvest.validate();
    consumption.validate();
    noise.validate();
    power.validate();
    mode.validate();
    if (!(penalty_weight >= 0.0)) throw DomainError("penalty_weight must be >= 0");
    if (fading.block_length < 1) throw DomainError("fading.block_length must be >= 1");
}

std::size_t observation_size(const Topology& t)
{
    const auto a = static_cast<std::size_t>(t.antennas);
    const auto b = static_cast<std::size_t>(t.su_receivers);
    const auto r = static_cast<std::size_t>(t.ris_elements);
    const auto w = static_cast<std::size_t>(t.pu_receivers);
    return 2 + 2 * r * a + 2 * r * b + 2 * a * w + 2 * a * b + r + 2;
}

std::size_t action_size(const Topology& t)
{
    return static_cast<std::size_t>(2 * t.antennas * t.su_receivers + t.ris_elements);
}

DecodedAction decode_action(std::span<const double> action, double cap, const Topology& topo, double beam_scale)
{
    if (action.size() != action_size(topo)) {
        throw ShapeError("decode_action: expected " + std::to_string(action_size(topo)) + " entries, got " +
                         std::to_string(action.size()));
    }
    const int rows = topo.antennas;
    const int cols = topo.su_receivers;
    cmat g(rows, cols);
    std::size_t k = 0;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j, k += 2) {
            g(i, j) = beam_scale * cplx(action[k], action[k + 1]);
        }
    }

    DecodedAction out{project_beamformer(g, cap), {}};
    out.phases.reserve(static_cast<std::size_t>(topo.ris_elements));
    for (int r = 0; r < topo.ris_elements; ++r, ++k) {
        out.phases.push_back(wrap_phase((action[k] + 1.0) * std::numbers::pi));
    }
    return out;
}

double phase_to_action(double eps)
{
    return wrap_phase(eps) / std::numbers::pi - 1.0;
}

HybridRisEnv::HybridRisEnv(EnvConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
}

double HybridRisEnv::beam_scale() const
{
    return std::sqrt(cfg_.power.max_power / (cfg_.topo.antennas * cfg_.topo.su_receivers));
}

vec HybridRisEnv::reset(std::uint64_t seed)
{
    rng_ = Rng(seed).split(1);
    step_ = 0;
    channels_ = sample_channel_set(rng_, cfg_.topo, cfg_.cascade);
    prev_beamformer_ = cmat::Zero(cfg_.topo.antennas, cfg_.topo.su_receivers);
    prev_phases_.assign(static_cast<std::size_t>(cfg_.topo.ris_elements), 0.0);
    prev_alpha_ = 0.0;
    prev_mode_ = 0.0;
    return observe();
}

StepOutcome HybridRisEnv::step(std::span<const double> action)
{
    const int elements = cfg_.topo.ris_elements;

    const EnergyLedger ledger = harvest(channels_.beacon_ris, cfg_.harvest);
    const Resolved resolved = resolve_mode(cfg_.mode, ledger, cfg_.harvest);
    const double cap = power_cap(cfg_.power, channels_.pu_gain);
    const DecodedAction decoded = decode_action(action, cap, cfg_.topo, beam_scale());

    double alpha = 1.0;
    if (resolved == Resolved::active) {
        alpha = cfg_.mode.kind == RisModeKind::fixed_hybrid ? cfg_.mode.fixed_gain
                                                             : energy_gain(ledger, elements, cfg_.active);
    }
    const cmat refl = build_reflection(decoded.phases, resolved, cfg_.passive, cfg_.active, alpha, cfg_.mode);

    std::vector<double> sinrs;
    sinrs.reserve(static_cast<std::size_t>(cfg_.topo.su_receivers));
    if (resolved == Resolved::passive) {
        for (int b = 0; b < cfg_.topo.su_receivers; ++b) {
            sinrs.push_back(sinr_passive(channels_, refl, decoded.beamformer, cfg_.noise, b));
        }
    } else {
        const cmat amp = amplifier_part(refl, cfg_.mode, resolved);
        for (int b = 0; b < cfg_.topo.su_receivers; ++b) {
            sinrs.push_back(
                sinr_active(channels_, refl, amp, decoded.beamformer, cfg_.noise, cfg_.active.amp_noise_var, b));
        }
    }
    const RateReport report = rate_report(sinrs);

    StepOutcome out;
    StepInfo& info = out.info;
    info.sum_rate = report.sum_rate;
    info.resolved = resolved;
    info.energy_total = ledger.total;
    info.alpha = alpha;
    info.cap = cap;
    info.tx_power = gram_trace(decoded.beamformer);
    // fixed hybrid elements are powered conventionally, so no harvest shortfall penalty
    if (resolved == Resolved::active && cfg_.mode.kind != RisModeKind::fixed_hybrid) {
        info.penalty = cfg_.penalty_weight * std::max(0.0, cfg_.harvest.threshold - ledger.total);
    }
    info.energy_consumed = energy_consumed(cfg_.mode, resolved, alpha, elements, cfg_.consumption);
    out.reward = info.sum_rate - info.penalty;

    prev_beamformer_ = decoded.beamformer;
    prev_phases_ = decoded.phases;
    prev_alpha_ = alpha;
    prev_mode_ = resolved == Resolved::active ? 1.0 : 0.0;

    ++step_;
    if (step_ % cfg_.fading.block_length == 0) {
        channels_ = sample_channel_set(rng_, cfg_.topo, cfg_.cascade);
    }
    out.observation = observe();
    return out;
}

vec HybridRisEnv::observe() const
{
    vec obs(static_cast<Eigen::Index>(observation_size()));
    Eigen::Index k = 0;
    auto put = [&](const cmat& m, double scale) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                obs[k++] = m(i, j).real() * scale;
                obs[k++] = m(i, j).imag() * scale;
            }
        }
    };

    const bool norm = cfg_.normalize_observation;
    obs[k++] = norm ? 1.0 : cfg_.power.max_power;
    obs[k++] = norm ? 1.0 : cfg_.power.interference;
    put(channels_.su_ris, 1.0);
    for (const cmat& h : channels_.ris_su) {
        put(h, 1.0);
    }
    put(channels_.su_pu, 1.0);
    put(prev_beamformer_, norm ? 1.0 / std::sqrt(cfg_.power.max_power) : 1.0);
    for (double eps : prev_phases_) {
        obs[k++] = eps;
    }
    obs[k++] = prev_alpha_;
    obs[k++] = prev_mode_;
    return obs;
}

EnvSnapshot HybridRisEnv::snapshot() const
{
    return {rng_.state(), step_, channels_, prev_beamformer_, prev_phases_, prev_alpha_, prev_mode_};
}

void HybridRisEnv::restore(const EnvSnapshot& s)
{
    rng_.set_state(s.rng);
    step_ = s.step;
    channels_ = s.channels;
    prev_beamformer_ = s.prev_beamformer;
    prev_phases_ = s.prev_phases;
    prev_alpha_ = s.prev_alpha;
    prev_mode_ = s.prev_mode;
}

} // namespace hris
