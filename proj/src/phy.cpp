#include "hris/phy.hpp"

#include <algorithm>
#include <cmath>

namespace hris {

void NoiseParams::validate() const
{
    if (!(passive_var > 0.0 && active_var > 0.0)) throw DomainError("noise variances must be > 0");
}

void PowerConstraint::validate() const
{
    if (!(max_power > 0.0)) throw DomainError("power.max_power must be > 0");
    if (!(interference > 0.0)) throw DomainError("power.interference must be > 0");
}

double power_cap(const PowerConstraint& pc, std::span<const double> pu_gain)
{
    if (pu_gain.empty()) throw DomainError("power_cap: need at least one PU gain");
    const double worst = *std::max_element(pu_gain.begin(), pu_gain.end());
    if (worst <= 0.0) return pc.max_power;
    return std::min(pc.max_power, pc.interference / worst);
}

cmat project_beamformer(const cmat& beamformer, double cap)
{
    if (!(cap > 0.0)) throw DomainError("project_beamformer: cap must be > 0");
    const double power = gram_trace(beamformer);
    if (power <= cap) return beamformer;
    cmat scaled = beamformer * std::sqrt(cap / power);
    // sqrt rounding can leave the trace a few ulps above the cap
    const double after = gram_trace(scaled);
    if (after > cap) scaled *= std::sqrt(cap / after) * (1.0 - 1e-15);
    return scaled;
}

cmat stream_gains(const ChannelSet& ch, const cmat& reflection, const cmat& beamformer, int receiver)
{
    const cmat& h = ch.ris_su.at(static_cast<std::size_t>(receiver));
    // reflection is diagonal, so h^T * refl is an element-wise product
    const cmat row = (h.array() * reflection.diagonal().array()).transpose().matrix();
    return (row * ch.su_ris) * beamformer;
}

namespace {

double interference_and_signal(const cmat& gains, int receiver, double& signal)
{
    double interference = 0.0;
    for (Eigen::Index r = 0; r < gains.cols(); ++r) {
        if (r == receiver) {
            signal = std::norm(gains(0, r));
        } else {
            interference += std::norm(gains(0, r));
        }
    }
    return interference;
}

} // namespace

double sinr_passive(const ChannelSet& ch, const cmat& reflection, const cmat& beamformer, const NoiseParams& np,
                    int receiver)
{
    double signal = 0.0;
    const double interference =
        interference_and_signal(stream_gains(ch, reflection, beamformer, receiver), receiver, signal);
    return signal / (interference + np.passive_var);
}

double sinr_active(const ChannelSet& ch, const cmat& reflection, const cmat& beamformer, const NoiseParams& np,
                   double amp_noise_var, int receiver)
{
    return sinr_active(ch, reflection, reflection, beamformer, np, amp_noise_var, receiver);
}

double sinr_active(const ChannelSet& ch, const cmat& reflection, const cmat& amplifier, const cmat& beamformer,
                   const NoiseParams& np, double amp_noise_var, int receiver)
{
    double signal = 0.0;
    const double interference =
        interference_and_signal(stream_gains(ch, reflection, beamformer, receiver), receiver, signal);
    const cmat& h = ch.ris_su.at(static_cast<std::size_t>(receiver));
    const double amp_gain = (h.array() * amplifier.diagonal().array()).abs2().sum();
    return signal / (interference + amp_noise_var * amp_gain + np.active_var);
}

RateReport rate_report(std::span<const double> sinrs)
{
    RateReport report;
    report.sinr.assign(sinrs.begin(), sinrs.end());
    report.rate.reserve(sinrs.size());
    for (double s : sinrs) {
        if (!(s >= 0.0)) throw DomainError("rate_report: SINR must be >= 0");
        report.rate.push_back(std::log2(1.0 + s));
        report.sum_rate += report.rate.back();
    }
    return report;
}

} // namespace hris
