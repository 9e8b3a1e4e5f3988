#pragma once

#include "hris/numerics.hpp"

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hris {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw native-endian binary stream used for checkpoints. Doubles are stored
/// bit-exactly so a reloaded run continues identically.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& os) : os_(os) {}

    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void i64(std::int64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }

    void str(const std::string& s)
    {
        u64(s.size());
        raw(s.data(), s.size());
    }

    void doubles(const std::vector<double>& v)
    {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(double));
    }

    template <class Derived>
    void matrix(const Eigen::PlainObjectBase<Derived>& m)
    {
        i64(m.rows());
        i64(m.cols());
        raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(typename Derived::Scalar));
    }

    void rng(const Rng::State& s)
    {
        u64(s.key);
        u64(s.counter);
    }

private:
    void raw(const void* p, std::size_t n)
    {
        os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!os_) throw FormatError("checkpoint write failed");
    }

    std::ostream& os_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::istream& is) : is_(is) {}

    std::uint64_t u64() { return value<std::uint64_t>(); }
    std::int64_t i64() { return value<std::int64_t>(); }
    double f64() { return value<double>(); }

    std::string str()
    {
        std::string s(checked_size(u64()), '\0');
        raw(s.data(), s.size());
        return s;
    }

    std::vector<double> doubles()
    {
        std::vector<double> v(checked_size(u64()));
        raw(v.data(), v.size() * sizeof(double));
        return v;
    }

    template <class Derived>
    void matrix(Eigen::PlainObjectBase<Derived>& m)
    {
        const auto rows = i64();
        const auto cols = i64();
        if (rows < 0 || cols < 0 || rows * cols > (std::int64_t{1} << 32)) throw FormatError("bad matrix header");
        m.resize(rows, cols);
        raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(typename Derived::Scalar));
    }

    Rng::State rng()
    {
        Rng::State s;
        s.key = u64();
        s.counter = u64();
        return s;
    }

    void expect(const std::string& tag)
    {
        const std::string got = str();
        if (got != tag) throw FormatError("checkpoint: expected section '" + tag + "', found '" + got + "'");
    }

private:
    template <class T>
    T value()
    {
        T v;
        raw(&v, sizeof v);
        return v;
    }

    static std::size_t checked_size(std::uint64_t n)
    {
        if (n > (std::uint64_t{1} << 34)) throw FormatError("implausible length in checkpoint");
        return static_cast<std::size_t>(n);
    }

    void raw(void* p, std::size_t n)
    {
        is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!is_) throw FormatError("checkpoint truncated");
    }

    std::istream& is_;
};

} // namespace hris
