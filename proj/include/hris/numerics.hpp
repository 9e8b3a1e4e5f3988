#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hris {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Dense complex storage, row-major to match the flattened observation layout.
template <class Scalar = double>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar = double>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using cmat = CMatrix<double>;
using cplx = std::complex<double>;
using vec = RVector<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

template <class Scalar>
CMatrix<Scalar> matmul(const CMatrix<Scalar>& a, const CMatrix<Scalar>& b)
{
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    return a * b;
}

template <class Scalar>
CMatrix<Scalar> hermitian(const CMatrix<Scalar>& a)
{
    return a.adjoint();
}

template <class Scalar>
std::complex<Scalar> trace(const CMatrix<Scalar>& a)
{
    if (a.rows() != a.cols()) {
        throw ShapeError("trace of non-square " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " matrix");
    }
    return a.trace();
}

/// tr(G G^H) without forming the product.
template <class Scalar>
Scalar gram_trace(const CMatrix<Scalar>& g)
{
    return g.squaredNorm();
}

/// Counter-based generator: output i is a fixed mix of (key, i).
///
/// The full state is two words, so it can be checkpointed and replayed exactly.
/// `split` derives an independent child key; a parent never shares a stream with
/// its children. Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    struct State {
        std::uint64_t key = 0;
        std::uint64_t counter = 0;
        bool operator==(const State&) const = default;
    };

    explicit Rng(std::uint64_t seed = 0) : state_{mix(seed ^ 0x6a09e667f3bcc909ULL), 0} {}
    explicit Rng(State s) : state_(s) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(state_.key + 0x9e3779b97f4a7c15ULL * ++state_.counter); }

    /// Child stream `stream_id`; does not advance this generator.
    Rng split(std::uint64_t stream_id) const
    {
        return Rng(State{mix(state_.key ^ mix(stream_id + 0xbb67ae8584caa73bULL)), 0});
    }

    /// Uniform in the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal()
    {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    const State& state() const { return state_; }
    void set_state(const State& s) { state_ = s; }

private:
    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    State state_;
};

/// Unit-power circularly-symmetric complex Gaussian, CN(0, 1).
inline cplx sample_cn01(Rng& rng)
{
    // |z|^2 ~ Exp(1) and arg z ~ U[0, 2pi) independently.
    const double mag = std::sqrt(-std::log(rng.uniform()));
    const double phase = two_pi * rng.uniform();
    return std::polar(mag, phase);
}

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

/// Wraps any finite angle into [0, 2pi).
inline double wrap_phase(double eps)
{
    double w = std::fmod(eps, two_pi);
    if (w < 0.0) {
        w += two_pi;
    }
    // fmod of a value just below 0 can round up to exactly 2pi
    return w >= two_pi ? 0.0 : w;
}

} // namespace hris
