#include "boresight/spatial.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "boresight/errors.hpp"

namespace boresight {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

NnIndex::NnIndex(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidArgument("NnIndex: empty point list");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t NnIndex::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = points_[order_[begin]], hi = lo;
    for (auto k = begin; k < end; ++k) {
        lo = lo.cwiseMin(points_[order_[k]]);
        hi = hi.cwiseMax(points_[order_[k]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[order_[mid]][axis];

    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void NnIndex::search(std::int32_t id, const Vec3& q, Neighbor& best) const {
    const Node& n = nodes_[id];
    if (n.left < 0) {
        for (auto k = n.begin; k < n.end; ++k) {
            const auto idx = order_[k];
            const double d = (points_[idx] - q).squaredNorm();
            if (d < best.sq_dist || (d == best.sq_dist && idx < best.index)) best = {idx, d};
        }
        return;
    }
    // Left holds coordinates <= split, right holds >= split.
    const double diff = q[n.axis] - n.split;
    const auto near = diff <= 0.0 ? n.left : n.right;
    const auto far = diff <= 0.0 ? n.right : n.left;
    search(near, q, best);
    if (diff * diff <= best.sq_dist) search(far, q, best);
}

Neighbor NnIndex::nearest(const Vec3& q) const {
    Neighbor best{std::numeric_limits<std::uint32_t>::max(), std::numeric_limits<double>::infinity()};
    search(0, q, best);
    return best;
}

double max_vertex_sq_dist(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("max_vertex_sq_dist: empty vertex set");
    double best = 0.0;
    for (const auto& p : a)
        for (const auto& q : b) best = std::max(best, (p - q).squaredNorm());
    return best;
}

}  // namespace boresight
