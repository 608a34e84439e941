#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace boresight {

/// Closed real interval [lo, hi]. Arithmetic rounds outward by one ulp so that
/// results enclose the exact real-valued result of the operation.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static constexpr Interval point(double x) noexcept { return {x, x}; }

    constexpr double width() const noexcept { return hi - lo; }
    constexpr double mid() const noexcept { return 0.5 * (lo + hi); }
    constexpr bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    constexpr bool contains(const Interval& o) const noexcept { return lo <= o.lo && o.hi <= hi; }
    constexpr bool is_point() const noexcept { return lo == hi; }
};

namespace detail {
inline double down(double x) noexcept { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) noexcept { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
}  // namespace detail

/// Widen by `eps` on both sides.
inline Interval inflate(const Interval& a, double eps) noexcept { return {a.lo - eps, a.hi + eps}; }

inline Interval hull(const Interval& a, const Interval& b) noexcept {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline Interval operator-(const Interval& a) noexcept { return {-a.hi, -a.lo}; }

inline Interval operator+(const Interval& a, const Interval& b) noexcept {
    return {detail::down(a.lo + b.lo), detail::up(a.hi + b.hi)};
}

inline Interval operator-(const Interval& a, const Interval& b) noexcept {
    return {detail::down(a.lo - b.hi), detail::up(a.hi - b.lo)};
}

inline Interval operator*(const Interval& a, const Interval& b) noexcept {
    const double p1 = a.lo * b.lo;
    const double p2 = a.lo * b.hi;
    const double p3 = a.hi * b.lo;
    const double p4 = a.hi * b.hi;
    return {detail::down(std::min({p1, p2, p3, p4})), detail::up(std::max({p1, p2, p3, p4}))};
}

inline Interval operator*(double s, const Interval& a) noexcept {
    return Interval::point(s) * a;
}

}  // namespace boresight
