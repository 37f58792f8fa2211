#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <ostream>
#include <stdexcept>

namespace mpnnc {

/// Closed real interval [lo, hi] with lo <= hi.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo <= hi)) throw std::invalid_argument("interval with lo > hi");
    }
    static Interval point(double x) { return {x, x}; }

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline Interval hull(const Interval& a, double x) {
    return {std::min(a.lo, x), std::max(a.hi, x)};
}

inline Interval operator+(const Interval& a, const Interval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

inline Interval operator+(const Interval& a, double c) { return {a.lo + c, a.hi + c}; }

inline Interval operator*(double a, const Interval& y) {
    return a >= 0.0 ? Interval{a * y.lo, a * y.hi} : Interval{a * y.hi, a * y.lo};
}

/// Sum of `count` values each drawn from `y`, accumulated left to right from
/// zero. Mirrors the order used by neighbour sums so rounding stays inside.
inline Interval repeated_sum(const Interval& y, std::size_t count) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        lo += y.lo;
        hi += y.hi;
    }
    return {lo, hi};
}

inline std::ostream& operator<<(std::ostream& os, const Interval& y) {
    return os << '[' << y.lo << ", " << y.hi << ']';
}

}  // namespace mpnnc
