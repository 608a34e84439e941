#include "boresight/search.hpp"

#include <chrono>
#include <random>

#include "boresight/errors.hpp"
#include "boresight/parallel.hpp"
#include "boresight/spatial.hpp"

namespace boresight {

namespace {

constexpr double kCollapsedWidth = 1e-6;  // rad

void require_nonempty(const Cloud& hat, const Cloud& bar) {
    if (hat.empty() || bar.empty()) throw InvalidArgument("objective: empty cloud");
}

}  // namespace

Evaluation evaluate_ub(const Cloud& hat, const Cloud& bar, const EulerAngles& angles) {
    require_nonempty(hat, bar);
    const RotationMatrix rb = rotation_from_angles(angles);
    const NnIndex index(georeference(bar, angles));
    Evaluation ev;
    ev.angles = angles;
    ev.objective = 0.0;
    ev.assignment.reserve(hat.size());
    for (const auto& p : hat.points) {
        const Neighbor nb = index.nearest(georeference_point(p, rb));
        ev.assignment.push_back(nb.index);
        ev.objective += nb.sq_dist;
    }
    return ev;
}

double objective_at(const Cloud& hat, const Cloud& bar, const EulerAngles& angles) {
    require_nonempty(hat, bar);
    const RotationMatrix rb = rotation_from_angles(angles);
    const NnIndex index(georeference(bar, angles));
    double sum = 0.0;
    for (const auto& p : hat.points) sum += index.nearest(georeference_point(p, rb)).sq_dist;
    return sum;
}

AgsResult ags(const Cloud& hat, const Cloud& bar, const AgsConfig& cfg) {
    require_nonempty(hat, bar);
    if (cfg.n_d < 1) throw InvalidArgument("ags: n_d must be >= 1");
    if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) throw InvalidArgument("ags: shrink must be in (0, 1)");
    if (!(cfg.t_max > 0.0)) throw InvalidArgument("ags: t_max must be positive");

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    const AngleBox& original = cfg.box;
    AngleBox current = original;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter_dist(-0.5, 0.5);
    std::array<double, 3> jitter{0.0, 0.0, 0.0};

    const std::size_t nd = cfg.n_d;
    const std::size_t cells = nd * nd * nd;
    std::vector<double> values(cells);
    std::vector<EulerAngles> centers(cells);

    AgsResult res;
    while (true) {
        for (std::size_t c = 0; c < cells; ++c) {
            const std::size_t idx[3] = {c / (nd * nd), (c / nd) % nd, c % nd};
            EulerAngles a;
            for (int k = 0; k < 3; ++k) {
                const Interval& ax = current[k];
                const double step = ax.width() / static_cast<double>(nd);
                a[k] = std::clamp(ax.lo + (static_cast<double>(idx[k]) + 0.5 + jitter[k]) * step, ax.lo, ax.hi);
            }
            centers[c] = a;
        }
        parallel_for(cells, cfg.threads, [&](std::size_t c, unsigned) { values[c] = objective_at(hat, bar, centers[c]); });
        res.evaluations += cells;

        // Lowest linear cell index wins ties.
        std::size_t best = 0;
        for (std::size_t c = 1; c < cells; ++c)
            if (values[c] < values[best]) best = c;
        if (values[best] < res.best.objective) {
            res.best.objective = values[best];
            res.best.angles = centers[best];
        }
        ++res.rounds;
        res.round_best.push_back(res.best.objective);

        if (nd == 1) break;  // a 1-cell grid re-evaluates the incumbent forever
        if (cfg.max_rounds && res.rounds >= cfg.max_rounds) break;
        if (elapsed() >= cfg.t_max) break;

        std::array<Interval, 3> next;
        for (int k = 0; k < 3; ++k) {
            const double half = cfg.shrink * current[k].width();
            const double c = res.best.angles[k];
            next[k] = {std::max(original[k].lo, c - half), std::min(original[k].hi, c + half)};
        }
        current = AngleBox(next[0], next[1], next[2]);
        if (current.max_width() < kCollapsedWidth) {
            current = original;
            for (auto& j : jitter) j = jitter_dist(rng);
            ++res.restarts;
        }
    }

    res.best = evaluate_ub(hat, bar, res.best.angles);
    res.elapsed = elapsed();
    return res;
}

}  // namespace boresight
