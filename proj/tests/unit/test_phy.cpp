#include "hris/phy.hpp"

#include <doctest.h>

#include <cmath>

using namespace hris;

namespace {

ChannelSet random_channels(Rng& rng, const Topology& topo)
{
    return sample_channel_set(rng, topo, CascadeSpec{1, 1, 1});
}

cmat random_matrix(Rng& rng, int rows, int cols)
{
    cmat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = sample_cn01(rng);
    return m;
}

cmat random_diagonal(Rng& rng, int r)
{
    cmat d = cmat::Zero(r, r);
    for (int i = 0; i < r; ++i) d(i, i) = std::polar(rng.uniform(0.6, 2.0), rng.uniform(0.0, 6.28));
    return d;
}

// scalar loops, independent of the matrix code
double naive_passive(const ChannelSet& ch, const cmat& refl, const cmat& g, double noise, int b)
{
    const int r_count = static_cast<int>(refl.rows());
    const int a_count = static_cast<int>(g.rows());
    const int streams = static_cast<int>(g.cols());
    std::vector<cplx> gain(streams, cplx(0.0));
    for (int s = 0; s < streams; ++s) {
        for (int r = 0; r < r_count; ++r) {
            cplx through(0.0);
            for (int a = 0; a < a_count; ++a) through += ch.su_ris(r, a) * g(a, s);
            gain[s] += ch.ris_su[b](r, 0) * refl(r, r) * through;
        }
    }
    double interference = 0.0;
    for (int s = 0; s < streams; ++s)
        if (s != b) interference += std::norm(gain[s]);
    return std::norm(gain[b]) / (interference + noise);
}

double naive_active(const ChannelSet& ch, const cmat& refl, const cmat& g, double noise, double amp, int b)
{
    double amp_power = 0.0;
    for (int r = 0; r < refl.rows(); ++r) amp_power += std::norm(ch.ris_su[b](r, 0) * refl(r, r));
    return naive_passive(ch, refl, g, noise + amp * amp_power, b);
}

} // namespace

TEST_CASE("rate of a single stream")
{
    const RateReport r = rate_report(std::vector<double>{4.0});
    CHECK(r.rate[0] == doctest::Approx(std::log2(5.0)).epsilon(1e-12));
    const RateReport two = rate_report(std::vector<double>{4.0, 3.8462});
    CHECK(two.sum_rate == doctest::Approx(4.5989).epsilon(1e-4));
    CHECK(two.sum_rate == doctest::Approx(two.rate[0] + two.rate[1]));
}

TEST_CASE("hand worked SINR")
{
    // one antenna, one element, two receivers; stream 0 is what receiver 0 wants
    ChannelSet ch;
    ch.su_ris = cmat::Constant(1, 1, cplx(1.0));
    ch.ris_su = {cmat::Constant(1, 1, cplx(1.0)), cmat::Constant(1, 1, cplx(1.0))};
    ch.su_pu = cmat::Constant(1, 1, cplx(1.0));
    ch.beacon_ris = cmat::Constant(1, 1, cplx(1.0));
    ch.pu_gain = {1.0};
    cmat g(1, 2);
    g(0, 0) = 2.0;
    g(0, 1) = 0.0;
    const cmat refl = cmat::Identity(1, 1);
    const NoiseParams np{1.0, 1.0};
    CHECK(sinr_passive(ch, refl, g, np, 0) == doctest::Approx(4.0));

    // active: alpha = 2, sigma_r^2 = 0.01 -> noise 1 + 0.04; signal 16
    const cmat active = cmat::Identity(1, 1) * 2.0;
    CHECK(sinr_active(ch, active, g, np, 0.01, 0) == doctest::Approx(16.0 / 1.04));
    CHECK(16.0 / 4.16 == doctest::Approx(3.8462).epsilon(1e-4));
    CHECK(sinr_active(ch, cmat::Identity(1, 1) * 2.0, g, NoiseParams{1.0, 4.0}, 0.04, 0) ==
          doctest::Approx(16.0 / 4.16));
}

TEST_CASE("SINR matches a scalar reimplementation")
{
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Topology topo{1 + static_cast<int>(rng.uniform(0.0, 3.0)), 2, 1 + static_cast<int>(rng.uniform(0.0, 5.0)), 2};
        const ChannelSet ch = random_channels(rng, topo);
        const cmat refl = random_diagonal(rng, topo.ris_elements);
        const cmat g = random_matrix(rng, topo.antennas, topo.su_receivers);
        const NoiseParams np{rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0)};
        const double amp = rng.uniform(0.0, 0.1);
        for (int b = 0; b < topo.su_receivers; ++b) {
            const double p = sinr_passive(ch, refl, g, np, b);
            const double a = sinr_active(ch, refl, g, np, amp, b);
            CHECK(std::abs(p - naive_passive(ch, refl, g, np.passive_var, b)) <= 1e-10 * std::max(1.0, p));
            CHECK(std::abs(a - naive_active(ch, refl, g, np.active_var, amp, b)) <= 1e-10 * std::max(1.0, a));
            CHECK(p >= 0.0);
            CHECK(a >= 0.0);
        }
    }
}

TEST_CASE("amplifier subset only adds its own noise")
{
    Rng rng(12);
    const Topology topo{2, 2, 4, 2};
    const ChannelSet ch = random_channels(rng, topo);
    const cmat refl = random_diagonal(rng, 4);
    const cmat g = random_matrix(rng, 2, 2);
    const NoiseParams np{1.0, 1.0};
    CHECK(sinr_active(ch, refl, refl, g, np, 0.01, 0) == doctest::Approx(sinr_active(ch, refl, g, np, 0.01, 0)));
    const cmat none = cmat::Zero(4, 4);
    CHECK(sinr_active(ch, refl, none, g, np, 0.01, 0) == doctest::Approx(sinr_passive(ch, refl, g, np, 0)));
}

TEST_CASE("SINR is monotone in noise")
{
    Rng rng(13);
    const Topology topo{2, 2, 4, 2};
    for (int trial = 0; trial < 50; ++trial) {
        const ChannelSet ch = random_channels(rng, topo);
        const cmat refl = random_diagonal(rng, 4);
        const cmat g = random_matrix(rng, 2, 2);
        const double lo = rng.uniform(0.1, 1.0);
        const double hi = lo + rng.uniform(0.0, 1.0);
        CHECK(sinr_passive(ch, refl, g, NoiseParams{hi, hi}, 0) <= sinr_passive(ch, refl, g, NoiseParams{lo, lo}, 0));
        CHECK(sinr_active(ch, refl, g, NoiseParams{1.0, 1.0}, hi, 1) <=
              sinr_active(ch, refl, g, NoiseParams{1.0, 1.0}, lo, 1));
    }
}

TEST_CASE("zero beamformer gives zero rate")
{
    Rng rng(14);
    const Topology topo{2, 2, 4, 2};
    const ChannelSet ch = random_channels(rng, topo);
    const cmat g = cmat::Zero(2, 2);
    const cmat refl = random_diagonal(rng, 4);
    CHECK(sinr_passive(ch, refl, g, NoiseParams{}, 0) == 0.0);
    CHECK(sinr_active(ch, refl, g, NoiseParams{}, 0.01, 1) == 0.0);
}

TEST_CASE("power cap")
{
    CHECK(power_cap(PowerConstraint{10.0, 10.0}, std::vector<double>{1.0, 0.5}) == doctest::Approx(10.0));
    CHECK(power_cap(PowerConstraint{10.0, 10.0}, std::vector<double>{4.0, 0.5}) == doctest::Approx(2.5));
    CHECK(power_cap(PowerConstraint{10.0, 10.0}, std::vector<double>{0.0, 0.0}) == doctest::Approx(10.0));
    CHECK_THROWS(power_cap(PowerConstraint{10.0, 1.0}, std::vector<double>{}));

    Rng rng(15);
    for (int i = 0; i < 1000; ++i) {
        const PowerConstraint pc{rng.uniform(0.1, 100.0), rng.uniform(0.1, 100.0)};
        std::vector<double> g{rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)};
        const double cap = power_cap(pc, g);
        CHECK(cap <= pc.max_power + 1e-12);
        for (double gi : g) CHECK(cap * gi <= pc.interference * (1.0 + 1e-12));
    }
}

TEST_CASE("projection")
{
    Rng rng(16);
    for (int i = 0; i < 500; ++i) {
        const cmat g = random_matrix(rng, 2, 2) * rng.uniform(0.0, 5.0);
        const double cap = rng.uniform(0.01, 10.0);
        const cmat p = project_beamformer(g, cap);
        CHECK(p.squaredNorm() <= cap * (1.0 + 1e-12));
        CHECK((project_beamformer(p, cap) - p).norm() <= 1e-12 * std::max(1.0, p.norm()));
        if (g.squaredNorm() <= cap) CHECK((p - g).norm() == 0.0);
        else CHECK(p.squaredNorm() == doctest::Approx(cap));
    }
    CHECK(project_beamformer(cmat::Zero(2, 2), 1.0).norm() == 0.0);
}

TEST_CASE("validation")
{
    CHECK_THROWS(NoiseParams{0.0, 1.0}.validate());
    CHECK_THROWS(PowerConstraint{-1.0, 1.0}.validate());
    CHECK_NOTHROW(PowerConstraint{}.validate());
}
