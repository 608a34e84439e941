#include <array>
#include <limits>

#include "boresight/errors.hpp"
#include "boresight/spatial.hpp"

namespace boresight {

namespace {

constexpr int kMaxIterations = 128;
constexpr double kRelTol = 1e-9;

struct SimplexVertex {
    Vec3 w;              // a[ia] - b[ib]
    std::uint32_t ia, ib;
};

struct Simplex {
    std::array<SimplexVertex, 4> v;
    std::array<double, 4> lambda{};
    int size = 0;
};

std::uint32_t argmax_dot(std::span<const Vec3> pts, const Vec3& dir) {
    std::uint32_t best = 0;
    double best_dot = pts[0].dot(dir);
    for (std::uint32_t k = 1; k < pts.size(); ++k) {
        const double d = pts[k].dot(dir);
        if (d > best_dot) {
            best_dot = d;
            best = k;
        }
    }
    return best;
}

// Projects the origin onto the affine hull of pts[idx[0..m]]; returns false if the
// sub-simplex is degenerate or the projection falls outside it.
bool project_subset(const Simplex& s, const std::array<int, 4>& idx, int m, std::array<double, 4>& lambda) {
    const Vec3& p0 = s.v[idx[0]].w;
    if (m == 1) {
        lambda[0] = 1.0;
        return true;
    }
    Vec3 d[3];
    for (int k = 1; k < m; ++k) d[k - 1] = s.v[idx[k]].w - p0;
    const int n = m - 1;
    double g[3][3] = {}, rhs[3] = {}, mu[3] = {};
    for (int r = 0; r < n; ++r) {
        rhs[r] = -d[r].dot(p0);
        for (int c = 0; c < n; ++c) g[r][c] = d[r].dot(d[c]);
    }
    if (n == 1) {
        if (!(g[0][0] > 0.0)) return false;
        mu[0] = rhs[0] / g[0][0];
    } else if (n == 2) {
        const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if (!(det > 1e-14 * g[0][0] * g[1][1])) return false;
        mu[0] = (rhs[0] * g[1][1] - g[0][1] * rhs[1]) / det;
        mu[1] = (g[0][0] * rhs[1] - rhs[0] * g[1][0]) / det;
    } else {
        const double c00 = g[1][1] * g[2][2] - g[1][2] * g[2][1];
        const double c01 = g[1][2] * g[2][0] - g[1][0] * g[2][2];
        const double c02 = g[1][0] * g[2][1] - g[1][1] * g[2][0];
        const double det = g[0][0] * c00 + g[0][1] * c01 + g[0][2] * c02;
        if (!(det > 1e-14 * g[0][0] * g[1][1] * g[2][2])) return false;
        // Cramer's rule on the symmetric Gram system
        const auto det3 = [](double a00, double a01, double a02, double a10, double a11, double a12, double a20,
                             double a21, double a22) {
            return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) + a02 * (a10 * a21 - a11 * a20);
        };
        mu[0] = det3(rhs[0], g[0][1], g[0][2], rhs[1], g[1][1], g[1][2], rhs[2], g[2][1], g[2][2]) / det;
        mu[1] = det3(g[0][0], rhs[0], g[0][2], g[1][0], rhs[1], g[1][2], g[2][0], rhs[2], g[2][2]) / det;
        mu[2] = det3(g[0][0], g[0][1], rhs[0], g[1][0], g[1][1], rhs[1], g[2][0], g[2][1], rhs[2]) / det;
    }
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        if (!(mu[k] >= 0.0)) return false;
        lambda[k + 1] = mu[k];
        sum += mu[k];
    }
    lambda[0] = 1.0 - sum;
    return lambda[0] >= 0.0;
}

// Replaces the simplex by the smallest face containing the point closest to the
// origin and returns that point.
Vec3 closest_on_simplex(Simplex& s) {
    double best_sq = std::numeric_limits<double>::infinity();
    Vec3 best_v = Vec3::Zero();
    std::array<int, 4> best_idx{};
    std::array<double, 4> best_lambda{};
    int best_m = 0;

    const int full = (1 << s.size) - 1;
    for (int mask = 1; mask <= full; ++mask) {
        std::array<int, 4> idx{};
        int m = 0;
        for (int k = 0; k < s.size; ++k)
            if (mask & (1 << k)) idx[m++] = k;
        std::array<double, 4> lambda{};
        if (!project_subset(s, idx, m, lambda)) continue;
        Vec3 v = Vec3::Zero();
        for (int k = 0; k < m; ++k) v += lambda[k] * s.v[idx[k]].w;
        if (m == 4) v.setZero();  // origin inside the tetrahedron
        const double sq = v.squaredNorm();
        if (sq < best_sq) {
            best_sq = sq;
            best_v = v;
            best_idx = idx;
            best_lambda = lambda;
            best_m = m;
        }
    }

    Simplex reduced;
    reduced.size = best_m;
    for (int k = 0; k < best_m; ++k) {
        reduced.v[k] = s.v[best_idx[k]];
        reduced.lambda[k] = best_lambda[k];
    }
    s = reduced;
    return best_v;
}

}  // namespace

GjkResult gjk_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("gjk: empty vertex set");

    GjkResult res;
    Simplex s;
    s.size = 1;
    s.v[0] = {a[0] - b[0], 0, 0};
    s.lambda[0] = 1.0;
    Vec3 v = s.v[0].w;

    double scale = 0.0;
    for (const auto& p : a) scale = std::max(scale, p.squaredNorm());
    for (const auto& p : b) scale = std::max(scale, p.squaredNorm());
    const double tiny = 1e-28 * (1.0 + scale);

    double lower = 0.0;
    double vv = v.squaredNorm();
    bool touching = false;
    for (res.iterations = 0; res.iterations < kMaxIterations; ++res.iterations) {
        if (vv <= tiny) {
            touching = true;
            break;
        }
        const auto ia = argmax_dot(a, -v);
        const auto ib = argmax_dot(b, v);
        const Vec3 w = a[ia] - b[ib];
        const double vw = v.dot(w);
        if (vw > 0.0) lower = std::max(lower, vw * vw / vv);
        if (vv - vw <= kRelTol * vv) break;

        bool duplicate = false;
        for (int k = 0; k < s.size; ++k) duplicate |= (s.v[k].ia == ia && s.v[k].ib == ib);
        if (duplicate) break;

        Simplex next = s;
        next.v[next.size++] = {w, ia, ib};
        const Vec3 nv = closest_on_simplex(next);
        const double nvv = nv.squaredNorm();
        if (!(nvv < vv)) break;  // no progress in floating point
        s = next;
        v = nv;
        vv = nvv;
        if (s.size == 4) {
            touching = true;
            break;
        }
    }

    if (touching) {
        res.sq_dist = 0.0;
        res.lower_sq_dist = 0.0;
    } else {
        res.sq_dist = vv;
        res.lower_sq_dist = std::min(lower, vv);
    }
    res.closest_a.setZero();
    res.closest_b.setZero();
    for (int k = 0; k < s.size; ++k) {
        res.closest_a += s.lambda[k] * a[s.v[k].ia];
        res.closest_b += s.lambda[k] * b[s.v[k].ib];
    }
    return res;
}

double gjk_min_sq_dist(std::span<const Vec3> a, std::span<const Vec3> b) {
    return gjk_distance(a, b).sq_dist;
}

}  // namespace boresight
