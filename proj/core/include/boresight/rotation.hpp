#pragma once

#include <array>
#include <numbers>

#include <Eigen/Core>

#include "boresight/interval.hpp"

namespace boresight {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Row-major 3x3 rotation, always built through rotation_from_angles or
/// rotation_from_quad so that it is orthonormal to round-off.
using RotationMatrix = Mat3;

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/// Boresight angles (roll alpha, pitch beta, yaw gamma) in radians.
struct EulerAngles {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    static EulerAngles from_degrees(double a, double b, double g) noexcept {
        return {deg_to_rad(a), deg_to_rad(b), deg_to_rad(g)};
    }
    std::array<double, 3> degrees() const noexcept {
        return {rad_to_deg(alpha), rad_to_deg(beta), rad_to_deg(gamma)};
    }
    double operator[](int axis) const noexcept { return axis == 0 ? alpha : axis == 1 ? beta : gamma; }
    double& operator[](int axis) noexcept { return axis == 0 ? alpha : axis == 1 ? beta : gamma; }
    bool finite() const noexcept;
};

/// Interval bounds per angle. Every search region (grid cell, B&B node) is one of these.
class AngleBox {
public:
    AngleBox() = default;
    /// Throws InvalidArgument unless lo <= hi, every bound is finite and
    /// strictly inside (-pi, pi), and no axis is wider than pi.
    AngleBox(Interval alpha, Interval beta, Interval gamma);

    /// [-half_width_deg, +half_width_deg] on every axis.
    static AngleBox symmetric_degrees(double half_width_deg);
    static AngleBox around(const EulerAngles& center, double half_width_rad);
    static AngleBox degenerate(const EulerAngles& at) { return around(at, 0.0); }

    const Interval& operator[](int axis) const noexcept { return axes_[axis]; }
    const Interval& alpha() const noexcept { return axes_[0]; }
    const Interval& beta() const noexcept { return axes_[1]; }
    const Interval& gamma() const noexcept { return axes_[2]; }

    EulerAngles midpoint() const noexcept;
    bool contains(const EulerAngles& a) const noexcept;
    bool contains(const AngleBox& other) const noexcept;
    double volume() const noexcept;
    double max_width() const noexcept;
    bool is_degenerate() const noexcept;

private:
    std::array<Interval, 3> axes_{};
};

/// Cosine (u) and sine (v) enclosures per angle plus the two bilinear terms
/// w_gb = u_gamma * v_beta and w_bg = v_beta * v_gamma.
struct TrigBounds {
    std::array<Interval, 3> cos;
    std::array<Interval, 3> sin;
    Interval w_gb;
    Interval w_bg;
};

/// Entrywise interval enclosure of R(alpha, beta, gamma) over an AngleBox.
struct RotationInterval {
    std::array<Interval, 9> entries;

    const Interval& operator()(int row, int col) const noexcept { return entries[row * 3 + col]; }
    Interval& operator()(int row, int col) noexcept { return entries[row * 3 + col]; }
    bool contains(const RotationMatrix& r) const noexcept;
};

/// Variables of the quadratic rotation form: cosines u, sines v and the two products.
struct QuadRotation {
    double u_alpha = 1.0, v_alpha = 0.0;
    double u_beta = 1.0, v_beta = 0.0;
    double u_gamma = 1.0, v_gamma = 0.0;
    double w_gb = 0.0;
    double w_bg = 0.0;

    static QuadRotation from_angles(const EulerAngles& a) noexcept;
};

/// R = Rx(alpha) * Ry(beta) * Rz(gamma). Throws InvalidArgument on non-finite input.
RotationMatrix rotation_from_angles(const EulerAngles& a);

/// The same matrix written in the quadratic (u, v, w) variables. Throws
/// InvalidArgument if u^2 + v^2 != 1 or the w products disagree, beyond 1e-9.
RotationMatrix rotation_from_quad(const QuadRotation& q);

/// Inverse of rotation_from_angles for |beta| < pi/2.
EulerAngles angles_from_rotation(const RotationMatrix& r) noexcept;

/// Tight enclosures of cos/sin over an interval, split at the critical points.
Interval cos_range(const Interval& x) noexcept;
Interval sin_range(const Interval& x) noexcept;

TrigBounds trig_bounds(const AngleBox& box);
RotationInterval rotation_interval(const AngleBox& box);

}  // namespace boresight
