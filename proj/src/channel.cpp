#include "hris/channel.hpp"

#include <string>

namespace hris {

void Topology::validate() const
{
    if (antennas < 1 || su_receivers < 1 || ris_elements < 1 || pu_receivers < 1) {
        throw DomainError("topology counts must all be >= 1");
    }
}

void CascadeSpec::validate() const
{
    if (su_to_ris < 1 || ris_to_su < 1 || su_to_pu < 1) {
        throw DomainError("cascade levels must all be >= 1");
    }
}

cplx sample_cascaded(Rng& rng, int kappa)
{
    if (kappa < 1) {
        throw DomainError("cascade level must be >= 1, got " + std::to_string(kappa));
    }
    cplx xi = sample_cn01(rng);
    for (int j = 1; j < kappa; ++j) {
        xi *= sample_cn01(rng);
    }
    return xi;
}

std::vector<double> pu_power_gains(const cmat& su_pu)
{
    std::vector<double> gains(static_cast<std::size_t>(su_pu.cols()));
    for (Eigen::Index i = 0; i < su_pu.cols(); ++i) {
        gains[static_cast<std::size_t>(i)] = su_pu.col(i).squaredNorm();
    }
    return gains;
}

namespace {

cmat draw(Rng& rng, int rows, int cols, int kappa)
{
    cmat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m(r, c) = sample_cascaded(rng, kappa);
        }
    }
    return m;
}

} // namespace

ChannelSet sample_channel_set(Rng& rng, const Topology& topo, const CascadeSpec& spec)
{
    topo.validate();
    spec.validate();

    ChannelSet ch;
    ch.su_ris = draw(rng, topo.ris_elements, topo.antennas, spec.su_to_ris);
    ch.ris_su.reserve(static_cast<std::size_t>(topo.su_receivers));
    for (int b = 0; b < topo.su_receivers; ++b) {
        ch.ris_su.push_back(draw(rng, topo.ris_elements, 1, spec.ris_to_su));
    }
    ch.su_pu = draw(rng, topo.antennas, topo.pu_receivers, spec.su_to_pu);
    ch.beacon_ris = draw(rng, topo.ris_elements, 1, 1);
    ch.pu_gain = pu_power_gains(ch.su_pu);
    return ch;
}

} // namespace hris
