#pragma once

#include "hris/channel.hpp"
#include "hris/numerics.hpp"

#include <span>
#include <vector>

namespace hris {

/// Receiver noise variances (watts). Data symbols are unit power, E[xx^H] = I.
struct NoiseParams {
    double passive_var = 1.0;
    double active_var = 1.0;

    void validate() const;
};

/// SU transmit budget and PU interference ceiling, both linear watts.
struct PowerConstraint {
    double max_power = 10.0;
    double interference = 10.0;

    void validate() const;
};

struct RateReport {
    std::vector<double> sinr;
    std::vector<double> rate;
    double sum_rate = 0.0;
};

/// min{P_t, I / max_i g_i}; P_t when no PU path carries power.
double power_cap(const PowerConstraint& pc, std::span<const double> pu_gain);

/// Rescales G onto the power ball tr(GG^H) <= cap; feasible inputs pass through.
cmat project_beamformer(const cmat& beamformer, double cap);

/// Row vector of h_b^T * refl * H_s * G; entry r is the amplitude of stream r at receiver b.
cmat stream_gains(const ChannelSet& ch, const cmat& reflection, const cmat& beamformer, int receiver);

double sinr_passive(const ChannelSet& ch, const cmat& reflection, const cmat& beamformer, const NoiseParams& np,
                    int receiver);

double sinr_active(const ChannelSet& ch, const cmat& reflection, const cmat& beamformer, const NoiseParams& np,
                   double amp_noise_var, int receiver);

/// Active SINR where only `amplifier` (a diagonal subset of the reflection) injects thermal noise.
double sinr_active(const ChannelSet& ch, const cmat& reflection, const cmat& amplifier, const cmat& beamformer,
                   const NoiseParams& np, double amp_noise_var, int receiver);

RateReport rate_report(std::span<const double> sinrs);

} // namespace hris
