#pragma once

#include "hris/numerics.hpp"

#include <span>
#include <vector>

namespace hris {

/// Phase-dependent reflection amplitude of a passive element.
struct PassiveParams {
    double beta_min = 0.6;
    double exponent = 1.5;
    double offset = 0.0;

    void validate() const;
};

struct ActiveParams {
    double alpha_min = 1.2;
    double alpha_max = 2.0;
    double e_max = 9.0;          // joules per element for full gain
    double amp_noise_var = 0.01; // sigma_r^2, watts

    void validate() const;
};

struct HarvestParams {
    double efficiency = 0.9;
    double beacon_power = 10.0; // watts
    double duration = 1.0;      // seconds
    double threshold = 50.0;    // tau, joules

    void validate() const;
};

struct EnergyLedger {
    std::vector<double> per_element;
    double total = 0.0;
};

struct ConsumptionParams {
    double p_passive = 1e-4; // W per element
    double p_amp = 0.05;     // W per unit gain per element
    double p_ctrl = 0.01;    // W per element
    double slot_seconds = 1.0;

    void validate() const;
};

enum class RisModeKind { passive, active, dynamic_hybrid, fixed_hybrid };

struct RisMode {
    RisModeKind kind = RisModeKind::dynamic_hybrid;
    double active_fraction = 0.5; // fixed_hybrid only
    double fixed_gain = 2.0;      // fixed_hybrid only

    void validate() const;

    static RisMode passive() { return {RisModeKind::passive}; }
    static RisMode active() { return {RisModeKind::active}; }
    static RisMode dynamic_hybrid() { return {RisModeKind::dynamic_hybrid}; }
    static RisMode fixed_hybrid(double fraction, double gain) { return {RisModeKind::fixed_hybrid, fraction, gain}; }
};

enum class Resolved { passive, active };

/// Per-step snapshot of the surface.
struct RisState {
    std::vector<double> phases;
    Resolved resolved = Resolved::passive;
    cmat reflection;
    double alpha_scaled = 1.0;
    EnergyLedger ledger;
};

double passive_amplitude(double eps, const PassiveParams& p);

/// Per-element harvested energy from the beacon channel (R x 1).
EnergyLedger harvest(const cmat& beacon_ris, const HarvestParams& hp);

/// Uniform active gain from the shared energy budget, clamped to alpha_max.
double energy_gain(const EnergyLedger& ledger, int elements, const ActiveParams& ap);

Resolved resolve_mode(const RisMode& mode, const EnergyLedger& ledger, const HarvestParams& hp);

/// Number of amplifying elements for a resolved step.
int amplifying_elements(const RisMode& mode, Resolved resolved, int elements);

/// Diagonal reflection matrix. Phases are wrapped into [0, 2pi).
cmat build_reflection(std::span<const double> phases, Resolved resolved, const PassiveParams& pp,
                      const ActiveParams& ap, double alpha, const RisMode& mode);

/// Diagonal restricted to amplifying elements; these are the only ones injecting amplifier noise.
cmat amplifier_part(const cmat& reflection, const RisMode& mode, Resolved resolved);

double energy_consumed(Resolved resolved, double alpha, int elements, const ConsumptionParams& cp);

/// Mode-aware variant; a fixed hybrid surface pays active cost only on its amplifying subset.
double energy_consumed(const RisMode& mode, Resolved resolved, double alpha, int elements,
                       const ConsumptionParams& cp);

} // namespace hris
