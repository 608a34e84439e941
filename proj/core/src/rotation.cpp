#include "boresight/rotation.hpp"

#include <cmath>
#include <string>

#include "boresight/errors.hpp"

namespace boresight {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTol = 1e-9;
// Covers the round-off of evaluating the trigonometric form in floating point.
constexpr double kEntrySlack = 2e-15;

// True when some c + k * period (k integer) lies in [lo, hi].
bool hits(double lo, double hi, double c, double period) noexcept {
    return std::ceil((lo - c) / period) <= std::floor((hi - c) / period);
}

Interval clamp_unit(Interval x) noexcept { return {std::max(x.lo, -1.0), std::min(x.hi, 1.0)}; }

}  // namespace

bool EulerAngles::finite() const noexcept {
    return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma);
}

AngleBox::AngleBox(Interval alpha, Interval beta, Interval gamma) : axes_{alpha, beta, gamma} {
    static constexpr const char* names[] = {"alpha", "beta", "gamma"};
    for (int k = 0; k < 3; ++k) {
        const auto& a = axes_[k];
        if (!std::isfinite(a.lo) || !std::isfinite(a.hi))
            throw InvalidArgument(std::string("angle box: non-finite bound on ") + names[k]);
        if (a.lo > a.hi)
            throw InvalidArgument(std::string("angle box: lo > hi on ") + names[k]);
        if (a.lo <= -kPi || a.hi >= kPi)
            throw InvalidArgument(std::string("angle box: bound outside (-pi, pi) on ") + names[k]);
        if (a.width() > kPi)
            throw InvalidArgument(std::string("angle box: width exceeds pi on ") + names[k]);
    }
}

AngleBox AngleBox::symmetric_degrees(double half_width_deg) {
    const double h = deg_to_rad(half_width_deg);
    return AngleBox({-h, h}, {-h, h}, {-h, h});
}

AngleBox AngleBox::around(const EulerAngles& c, double half_width_rad) {
    const double h = half_width_rad;
    return AngleBox({c.alpha - h, c.alpha + h}, {c.beta - h, c.beta + h}, {c.gamma - h, c.gamma + h});
}

EulerAngles AngleBox::midpoint() const noexcept {
    return {axes_[0].mid(), axes_[1].mid(), axes_[2].mid()};
}

bool AngleBox::contains(const EulerAngles& a) const noexcept {
    return axes_[0].contains(a.alpha) && axes_[1].contains(a.beta) && axes_[2].contains(a.gamma);
}

bool AngleBox::contains(const AngleBox& o) const noexcept {
    return axes_[0].contains(o.axes_[0]) && axes_[1].contains(o.axes_[1]) &&
           axes_[2].contains(o.axes_[2]);
}

double AngleBox::volume() const noexcept {
    return axes_[0].width() * axes_[1].width() * axes_[2].width();
}

double AngleBox::max_width() const noexcept {
    return std::max({axes_[0].width(), axes_[1].width(), axes_[2].width()});
}

bool AngleBox::is_degenerate() const noexcept {
    return axes_[0].is_point() && axes_[1].is_point() && axes_[2].is_point();
}

bool RotationInterval::contains(const RotationMatrix& r) const noexcept {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!(*this)(i, j).contains(r(i, j))) return false;
    return true;
}

QuadRotation QuadRotation::from_angles(const EulerAngles& a) noexcept {
    QuadRotation q;
    q.u_alpha = std::cos(a.alpha);
    q.v_alpha = std::sin(a.alpha);
    q.u_beta = std::cos(a.beta);
    q.v_beta = std::sin(a.beta);
    q.u_gamma = std::cos(a.gamma);
    q.v_gamma = std::sin(a.gamma);
    q.w_gb = q.u_gamma * q.v_beta;
    q.w_bg = q.v_beta * q.v_gamma;
    return q;
}

RotationMatrix rotation_from_angles(const EulerAngles& a) {
    if (!a.finite()) throw InvalidArgument("rotation_from_angles: non-finite angle");
    const double ca = std::cos(a.alpha), sa = std::sin(a.alpha);
    const double cb = std::cos(a.beta), sb = std::sin(a.beta);
    const double cg = std::cos(a.gamma), sg = std::sin(a.gamma);

    RotationMatrix r;
    r << cb * cg,                     -cb * sg,                     sb,
         ca * sg + sa * sb * cg,      ca * cg - sa * sb * sg,       -cb * sa,
         sa * sg - ca * sb * cg,      sa * cg + ca * sb * sg,       ca * cb;
    return r;
}

RotationMatrix rotation_from_quad(const QuadRotation& q) {
    const auto check_circle = [](double u, double v, const char* axis) {
        if (!std::isfinite(u) || !std::isfinite(v) || std::abs(u * u + v * v - 1.0) > kQuadTol)
            throw InvalidArgument(std::string("rotation_from_quad: u^2 + v^2 != 1 for ") + axis);
    };
    check_circle(q.u_alpha, q.v_alpha, "alpha");
    check_circle(q.u_beta, q.v_beta, "beta");
    check_circle(q.u_gamma, q.v_gamma, "gamma");
    if (!(std::abs(q.w_gb - q.u_gamma * q.v_beta) <= kQuadTol))
        throw InvalidArgument("rotation_from_quad: w_gb != u_gamma * v_beta");
    if (!(std::abs(q.w_bg - q.v_beta * q.v_gamma) <= kQuadTol))
        throw InvalidArgument("rotation_from_quad: w_bg != v_beta * v_gamma");

    RotationMatrix r;
    r << q.u_beta * q.u_gamma,                        -q.u_beta * q.v_gamma,                       q.v_beta,
         q.u_alpha * q.v_gamma + q.v_alpha * q.w_gb,  q.u_alpha * q.u_gamma - q.v_alpha * q.w_bg,  -q.u_beta * q.v_alpha,
         q.v_alpha * q.v_gamma - q.u_alpha * q.w_gb,  q.v_alpha * q.u_gamma + q.u_alpha * q.w_bg,  q.u_alpha * q.u_beta;
    return r;
}

EulerAngles angles_from_rotation(const RotationMatrix& r) noexcept {
    EulerAngles a;
    a.beta = std::asin(std::clamp(r(0, 2), -1.0, 1.0));
    a.alpha = std::atan2(-r(1, 2), r(2, 2));
    a.gamma = std::atan2(-r(0, 1), r(0, 0));
    return a;
}

Interval cos_range(const Interval& x) noexcept {
    const double c1 = std::cos(x.lo);
    const double c2 = std::cos(x.hi);
    Interval out{std::min(c1, c2), std::max(c1, c2)};
    if (x.is_point()) return out;
    if (hits(x.lo, x.hi, 0.0, 2.0 * kPi)) out.hi = 1.0;
    if (hits(x.lo, x.hi, kPi, 2.0 * kPi)) out.lo = -1.0;
    return clamp_unit(out);
}

Interval sin_range(const Interval& x) noexcept {
    const double s1 = std::sin(x.lo);
    const double s2 = std::sin(x.hi);
    Interval out{std::min(s1, s2), std::max(s1, s2)};
    if (x.is_point()) return out;
    if (hits(x.lo, x.hi, 0.5 * kPi, 2.0 * kPi)) out.hi = 1.0;
    if (hits(x.lo, x.hi, -0.5 * kPi, 2.0 * kPi)) out.lo = -1.0;
    return clamp_unit(out);
}

TrigBounds trig_bounds(const AngleBox& box) {
    TrigBounds t;
    for (int k = 0; k < 3; ++k) {
        t.cos[k] = cos_range(box[k]);
        t.sin[k] = sin_range(box[k]);
    }
    t.w_gb = t.cos[2] * t.sin[1];
    t.w_bg = t.sin[1] * t.sin[2];
    return t;
}

RotationInterval rotation_interval(const AngleBox& box) {
    const TrigBounds t = trig_bounds(box);
    const Interval& ua = t.cos[0];
    const Interval& va = t.sin[0];
    const Interval& ub = t.cos[1];
    const Interval& vb = t.sin[1];
    const Interval& ug = t.cos[2];
    const Interval& vg = t.sin[2];

    RotationInterval r;
    r(0, 0) = ub * ug;
    r(0, 1) = -(ub * vg);
    r(0, 2) = vb;
    r(1, 0) = ua * vg + va * t.w_gb;
    r(1, 1) = ua * ug - va * t.w_bg;
    r(1, 2) = -(ub * va);
    r(2, 0) = va * vg - ua * t.w_gb;
    r(2, 1) = va * ug + ua * t.w_bg;
    r(2, 2) = ua * ub;
    for (auto& e : r.entries) e = clamp_unit(inflate(e, kEntrySlack));
    return r;
}

}  // namespace boresight
