#pragma once

#include <span>
#include <vector>

#include "boresight/cloud.hpp"
#include "boresight/rotation.hpp"
#include "boresight/spatial.hpp"

namespace boresight {

/// Absolute slack [m^2] used to widen exported pair bounds so pruning stays conservative.
inline constexpr double kBoundSlack = 1e-6;

/// Axis-aligned enclosure K of { R l : angles in box }.
struct ReachBox {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3& x, double slack = 0.0) const noexcept {
        return ((x - lo).array() >= -slack).all() && ((hi - x).array() >= -slack).all();
    }
    Vec3 center() const { return 0.5 * (lo + hi); }
};

/// normal . x <= offset, with |normal| = 1.
struct Halfspace {
    Vec3 normal = Vec3::UnitX();
    double offset = 0.0;
};

/// Convex relaxation C(0, I, l) of the reachable set: K intersected with
/// tangent cuts of the sphere |x| = |l| and the secant cut over K.
struct UncertaintyPolytope {
    std::vector<Halfspace> halfspaces;
    VertexSet vertices;
    double norm_sq = 0.0;  ///< |l|^2

    bool contains(const Vec3& x, double slack) const noexcept {
        for (const auto& h : halfspaces)
            if (h.normal.dot(x) > h.offset + slack) return false;
        return true;
    }
};

/// Certified bounds on the squared distance of a pair over an angle box.
struct PairBounds {
    double c_lo = 0.0;
    double c_hi = 0.0;
};

ReachBox reach_box(const Vec3& l, const RotationInterval& rot);
ReachBox reach_box(const Vec3& l, const AngleBox& box);

UncertaintyPolytope build_polytope(const Vec3& l, const RotationInterval& rot);
UncertaintyPolytope build_polytope(const Vec3& l, const AngleBox& box);

/// Vertices of { x : h.normal . x <= h.offset for all h } by intersecting every
/// triple of planes and keeping feasible points (tolerance `tol` in metres),
/// merging duplicates closer than 1e-9. Empty if the system has no vertex.
VertexSet enumerate_vertices(std::span<const Halfspace> halfspaces, double tol);

/// { s + R v : v in V(p) }.
VertexSet transform_polytope(const UncertaintyPolytope& p, const Vec3& s, const RotationMatrix& r);

/// c_lo from GJK (certified lower value), c_hi from the vertex-pair maximum.
PairBounds pair_bounds(std::span<const Vec3> hat_vertices, std::span<const Vec3> bar_vertices);
PairBounds pair_bounds(const ScanPoint& hat, const ScanPoint& bar, const AngleBox& box);

/// Bounds widened by kBoundSlack (c_lo clamped at zero).
inline PairBounds conservative(PairBounds b) noexcept {
    return {std::max(0.0, b.c_lo - kBoundSlack), b.c_hi + kBoundSlack};
}

/// Mapping-frame vertex sets of one cloud over one angle box, built on first
/// access. Not thread-safe for concurrent first access; use one cache per worker.
class PolytopeCache {
public:
    PolytopeCache(const Cloud& cloud, const AngleBox& box);

    const VertexSet& vertices(std::size_t i);
    const AngleBox& box() const noexcept { return box_; }
    std::size_t built() const noexcept { return built_count_; }

private:
    const Cloud* cloud_;
    AngleBox box_;
    RotationInterval rot_;
    std::vector<VertexSet> sets_;
    std::vector<char> built_;
    std::size_t built_count_ = 0;
};

}  // namespace boresight
