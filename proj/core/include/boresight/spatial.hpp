#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "boresight/rotation.hpp"

namespace boresight {

/// Vertices of a convex polytope (or any finite point set, whose hull is meant).
using VertexSet = std::vector<Vec3>;

struct Neighbor {
    std::uint32_t index = 0;
    double sq_dist = 0.0;
};

/// Static kd-tree answering exact nearest-neighbour queries. Ties go to the
/// smallest original index, so results match a linear scan exactly.
class NnIndex {
public:
    /// Throws InvalidArgument on an empty point list.
    explicit NnIndex(std::vector<Vec3> points);

    Neighbor nearest(const Vec3& q) const;
    std::size_t size() const noexcept { return points_.size(); }
    const Vec3& point(std::uint32_t i) const { return points_[i]; }

private:
    struct Node {
        std::uint32_t begin, end;        // range in order_
        std::int32_t left = -1, right = -1;
        int axis = 0;
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const Vec3& q, Neighbor& best) const;

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

inline NnIndex build_index(std::vector<Vec3> points) { return NnIndex(std::move(points)); }
inline Neighbor nearest_sq_dist(const NnIndex& index, const Vec3& q) { return index.nearest(q); }

struct GjkResult {
    double sq_dist = 0.0;        ///< |v|^2 for the final iterate, within 1e-9 relative of the optimum
    double lower_sq_dist = 0.0;  ///< certified lower bound from the support-plane gap
    Vec3 closest_a = Vec3::Zero();
    Vec3 closest_b = Vec3::Zero();
    int iterations = 0;
};

/// Minimum distance between conv(a) and conv(b) by GJK over raw vertex lists,
/// closest points on the simplex found by exhaustive sub-simplex projection
/// (Johnson's distance sub-algorithm). Zero when the hulls intersect.
GjkResult gjk_distance(std::span<const Vec3> a, std::span<const Vec3> b);

/// Squared distance between conv(a) and conv(b). Throws InvalidArgument on empty input.
double gjk_min_sq_dist(std::span<const Vec3> a, std::span<const Vec3> b);

/// Largest squared distance between a vertex of `a` and a vertex of `b`; this is the
/// maximum over the hulls since the squared distance is convex.
double max_vertex_sq_dist(std::span<const Vec3> a, std::span<const Vec3> b);

}  // namespace boresight
