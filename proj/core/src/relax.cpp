#include "boresight/relax.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <cmath>

namespace boresight {

namespace {

constexpr double kMergeTol = 1e-9;
// Absolute feasibility slack [m] for enumerated vertices.
constexpr double kVertexTol = 1e-9;
constexpr double kDetTol = 1e-10;
// Relative widening of cut offsets for the round-off in |l| and the cut coefficients.
constexpr double kCutSlack = 1e-12;

void add_tangent(std::vector<Halfspace>& hs, const Vec3& direction, double radius) {
    const double n = direction.norm();
    if (!(n > 0.0)) return;
    hs.push_back({direction / n, radius + kCutSlack * (1.0 + radius)});
}

}  // namespace

ReachBox reach_box(const Vec3& l, const RotationInterval& rot) {
    ReachBox k;
    for (int r = 0; r < 3; ++r) {
        Interval acc = rot(r, 0) * Interval::point(l.x()) + rot(r, 1) * Interval::point(l.y()) +
                       rot(r, 2) * Interval::point(l.z());
        k.lo[r] = acc.lo;
        k.hi[r] = acc.hi;
    }
    return k;
}

ReachBox reach_box(const Vec3& l, const AngleBox& box) { return reach_box(l, rotation_interval(box)); }

VertexSet enumerate_vertices(std::span<const Halfspace> hs, double tol) {
    VertexSet out;
    const std::size_t n = hs.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3 nij = hs[i].normal.cross(hs[j].normal);
            if (nij.squaredNorm() < kDetTol * kDetTol) continue;
            for (std::size_t k = j + 1; k < n; ++k) {
                const double det = hs[k].normal.dot(nij);
                if (std::abs(det) < kDetTol) continue;
                // Solve [ni; nj; nk] x = [bi; bj; bk] via the cross-product form of Cramer's rule.
                const Vec3 njk = hs[j].normal.cross(hs[k].normal);
                const Vec3 nki = hs[k].normal.cross(hs[i].normal);
                const Vec3 x = (hs[i].offset * njk + hs[j].offset * nki + hs[k].offset * nij) / det;

                bool feasible = true;
                for (std::size_t m = 0; m < n && feasible; ++m)
                    feasible = hs[m].normal.dot(x) <= hs[m].offset + tol;
                if (!feasible) continue;

                bool dup = false;
                for (const auto& v : out)
                    if ((v - x).squaredNorm() <= kMergeTol * kMergeTol) {
                        dup = true;
                        break;
                    }
                if (!dup) out.push_back(x);
            }
        }
    }
    return out;
}

UncertaintyPolytope build_polytope(const Vec3& l, const RotationInterval& rot) {
    UncertaintyPolytope p;
    p.norm_sq = l.squaredNorm();
    const ReachBox k = reach_box(l, rot);
    for (int e = 0; e < 3; ++e) {
        p.halfspaces.push_back({Vec3::Unit(e), k.hi[e]});
        p.halfspaces.push_back({-Vec3::Unit(e), -k.lo[e]});
    }
    if (p.norm_sq == 0.0) {
        p.vertices = {Vec3::Zero()};
        return p;
    }
    const double r = std::sqrt(p.norm_sq);

    // Tangent cuts: one at the radial projection of the K centre, one per K corner
    // lying outside the sphere.
    add_tangent(p.halfspaces, k.center(), r);
    for (int c = 0; c < 8; ++c) {
        const Vec3 corner((c & 1) ? k.hi.x() : k.lo.x(), (c & 2) ? k.hi.y() : k.lo.y(),
                          (c & 4) ? k.hi.z() : k.lo.z());
        if (corner.squaredNorm() > p.norm_sq) add_tangent(p.halfspaces, corner, r);
    }

    // Secant: |l|^2 <= sum_e x_e (lo_e + hi_e) - lo_e hi_e.
    const Vec3 coef = k.lo + k.hi;
    const double cn = coef.norm();
    if (cn > 0.0) {
        const double rhs = p.norm_sq + k.lo.dot(k.hi);
        p.halfspaces.push_back({-coef / cn, -rhs / cn + kCutSlack * (1.0 + r)});
    }

    p.vertices = enumerate_vertices(p.halfspaces, kVertexTol);
    if (p.vertices.empty()) {
        // Numerically empty intersection; fall back to the corners of K.
        for (int c = 0; c < 8; ++c)
            p.vertices.emplace_back((c & 1) ? k.hi.x() : k.lo.x(), (c & 2) ? k.hi.y() : k.lo.y(),
                                    (c & 4) ? k.hi.z() : k.lo.z());
    }
    return p;
}

UncertaintyPolytope build_polytope(const Vec3& l, const AngleBox& box) {
    return build_polytope(l, rotation_interval(box));
}

VertexSet transform_polytope(const UncertaintyPolytope& p, const Vec3& s, const RotationMatrix& r) {
    VertexSet out;
    out.reserve(p.vertices.size());
    for (const auto& v : p.vertices) out.push_back(s + r * v);
    return out;
}

PairBounds pair_bounds(std::span<const Vec3> hat_vertices, std::span<const Vec3> bar_vertices) {
    const GjkResult g = gjk_distance(hat_vertices, bar_vertices);
    return {g.lower_sq_dist, max_vertex_sq_dist(hat_vertices, bar_vertices)};
}

PairBounds pair_bounds(const ScanPoint& hat, const ScanPoint& bar, const AngleBox& box) {
    const RotationInterval rot = rotation_interval(box);
    const auto vh = transform_polytope(build_polytope(hat.l, rot), hat.s, hat.ins_rotation);
    const auto vb = transform_polytope(build_polytope(bar.l, rot), bar.s, bar.ins_rotation);
    return pair_bounds(vh, vb);
}

PolytopeCache::PolytopeCache(const Cloud& cloud, const AngleBox& box)
    : cloud_(&cloud), box_(box), rot_(rotation_interval(box)), sets_(cloud.size()), built_(cloud.size(), 0) {}

const VertexSet& PolytopeCache::vertices(std::size_t i) {
    if (!built_[i]) {
        const ScanPoint& p = (*cloud_)[i];
        sets_[i] = transform_polytope(build_polytope(p.l, rot_), p.s, p.ins_rotation);
        built_[i] = 1;
        ++built_count_;
    }
    return sets_[i];
}

}  // namespace boresight
