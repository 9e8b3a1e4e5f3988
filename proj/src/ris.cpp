#include "hris/ris.hpp"

#include <algorithm>
#include <cmath>

namespace hris {

void PassiveParams::validate() const
{
    if (!(beta_min >= 0.0 && beta_min <= 1.0)) throw DomainError("passive.beta_min must lie in [0, 1]");
    if (!(exponent >= 0.0)) throw DomainError("passive.exponent must be >= 0");
    if (!(offset >= 0.0)) throw DomainError("passive.offset must be >= 0");
}

void ActiveParams::validate() const
{
    if (!(alpha_min > 1.0)) throw DomainError("active.alpha_min must be > 1");
    if (!(alpha_max >= alpha_min)) throw DomainError("active.alpha_max must be >= alpha_min");
    if (!(e_max > 0.0)) throw DomainError("active.e_max must be > 0");
    if (!(amp_noise_var >= 0.0)) throw DomainError("active.amp_noise_var must be >= 0");
}

void HarvestParams::validate() const
{
    if (!(efficiency > 0.0 && efficiency <= 1.0)) throw DomainError("harvest.efficiency must lie in (0, 1]");
    if (!(beacon_power >= 0.0)) throw DomainError("harvest.beacon_power must be >= 0");
    if (!(duration > 0.0)) throw DomainError("harvest.duration must be > 0");
    if (!(threshold >= 0.0)) throw DomainError("harvest.threshold must be >= 0");
}

void ConsumptionParams::validate() const
{
    if (!(p_passive >= 0.0 && p_amp >= 0.0 && p_ctrl >= 0.0)) throw DomainError("consumption powers must be >= 0");
    if (!(slot_seconds > 0.0)) throw DomainError("consumption.slot_seconds must be > 0");
}

void RisMode::validate() const
{
    if (kind != RisModeKind::fixed_hybrid) return;
    if (!(active_fraction >= 0.0 && active_fraction <= 1.0)) {
        throw DomainError("mode.active_fraction must lie in [0, 1]");
    }
    if (!(fixed_gain > 1.0)) throw DomainError("mode.fixed_gain must be > 1");
}

double passive_amplitude(double eps, const PassiveParams& p)
{
    const double s = (std::sin(eps - p.offset) + 1.0) / 2.0;
    // sin can overshoot 1 by an ulp; keep the base in [0, 1]
    const double base = std::clamp(s, 0.0, 1.0);
    return (1.0 - p.beta_min) * std::pow(base, p.exponent) + p.beta_min;
}

EnergyLedger harvest(const cmat& beacon_ris, const HarvestParams& hp)
{
    EnergyLedger ledger;
    ledger.per_element.resize(static_cast<std::size_t>(beacon_ris.size()));
    for (Eigen::Index r = 0; r < beacon_ris.size(); ++r) {
        const double e = hp.efficiency * std::norm(beacon_ris(r)) * hp.beacon_power * hp.duration;
        ledger.per_element[static_cast<std::size_t>(r)] = e;
        ledger.total += e;
    }
    return ledger;
}

double energy_gain(const EnergyLedger& ledger, int elements, const ActiveParams& ap)
{
    if (elements < 1) throw DomainError("energy_gain: element count must be >= 1");
    const double ratio = (ledger.total / elements) / ap.e_max;
    const double alpha = ap.alpha_min + (ap.alpha_max - ap.alpha_min) * ratio;
    return std::min(alpha, ap.alpha_max);
}

Resolved resolve_mode(const RisMode& mode, const EnergyLedger& ledger, const HarvestParams& hp)
{
    switch (mode.kind) {
    case RisModeKind::passive:
        return Resolved::passive;
    case RisModeKind::active:
    case RisModeKind::fixed_hybrid:
        return Resolved::active;
    case RisModeKind::dynamic_hybrid:
        return ledger.total >= hp.threshold ? Resolved::active : Resolved::passive;
    }
    return Resolved::passive;
}

int amplifying_elements(const RisMode& mode, Resolved resolved, int elements)
{
    if (resolved == Resolved::passive) return 0;
    if (mode.kind == RisModeKind::fixed_hybrid) {
        return static_cast<int>(std::floor(mode.active_fraction * elements));
    }
    return elements;
}

cmat build_reflection(std::span<const double> phases, Resolved resolved, const PassiveParams& pp,
                      const ActiveParams& ap, double alpha, const RisMode& mode)
{
    (void)ap;
    const int n = static_cast<int>(phases.size());
    const int amplified = amplifying_elements(mode, resolved, n);
    const double gain = mode.kind == RisModeKind::fixed_hybrid ? mode.fixed_gain : alpha;

    cmat refl = cmat::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        const double eps = wrap_phase(phases[static_cast<std::size_t>(r)]);
        const double amplitude = r < amplified ? gain : passive_amplitude(eps, pp);
        refl(r, r) = std::polar(amplitude, eps);
    }
    return refl;
}

cmat amplifier_part(const cmat& reflection, const RisMode& mode, Resolved resolved)
{
    const int n = static_cast<int>(reflection.rows());
    const int amplified = amplifying_elements(mode, resolved, n);
    cmat part = cmat::Zero(n, n);
    for (int r = 0; r < amplified; ++r) {
        part(r, r) = reflection(r, r);
    }
    return part;
}

double energy_consumed(Resolved resolved, double alpha, int elements, const ConsumptionParams& cp)
{
    if (resolved == Resolved::passive) {
        return elements * cp.p_passive * cp.slot_seconds;
    }
    return elements * (alpha * cp.p_amp + cp.p_ctrl) * cp.slot_seconds;
}

double energy_consumed(const RisMode& mode, Resolved resolved, double alpha, int elements,
                       const ConsumptionParams& cp)
{
    if (mode.kind != RisModeKind::fixed_hybrid || resolved == Resolved::passive) {
        return energy_consumed(resolved, alpha, elements, cp);
    }
    const int amplified = amplifying_elements(mode, resolved, elements);
    return energy_consumed(Resolved::active, mode.fixed_gain, amplified, cp) +
           energy_consumed(Resolved::passive, 1.0, elements - amplified, cp);
}

} // namespace hris
