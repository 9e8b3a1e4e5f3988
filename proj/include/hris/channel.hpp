#pragma once

#include "hris/numerics.hpp"

#include <vector>

namespace hris {

/// Network dimensions: A transmit antennas, B SU receivers, R RIS elements, W PU receivers.
struct Topology {
    int antennas = 2;
    int su_receivers = 2;
    int ris_elements = 4;
    int pu_receivers = 2;

    void validate() const;
};

/// Number of multiplicative Rayleigh factors per link.
struct CascadeSpec {
    int su_to_ris = 4;
    int ris_to_su = 4;
    int su_to_pu = 1;

    void validate() const;
};

/// One time slot of every channel in the network.
struct ChannelSet {
    cmat su_ris;              // R x A
    std::vector<cmat> ris_su; // B entries, each R x 1
    cmat su_pu;               // A x W
    cmat beacon_ris;          // R x 1, plain Rayleigh
    std::vector<double> pu_gain; // squared norm of each su_pu column

    bool operator==(const ChannelSet&) const = default;
};

/// Channels are redrawn every `block_length` environment steps.
struct FadingMode {
    long block_length = 1;
};

cplx sample_cascaded(Rng& rng, int kappa);

std::vector<double> pu_power_gains(const cmat& su_pu);

ChannelSet sample_channel_set(Rng& rng, const Topology& topo, const CascadeSpec& spec);

} // namespace hris
