#include "boresight/reduce.hpp"

#include <algorithm>
#include <limits>

#include "boresight/errors.hpp"

namespace boresight {

struct PairSetBuilder {
    PairSet set;
    PairSetBuilder(std::size_t n_hat, std::size_t reserve) {
        set.offsets_.reserve(n_hat + 1);
        set.offsets_.push_back(0);
        set.cands_.reserve(reserve);
    }
    void push(const Candidate& c) { set.cands_.push_back(c); }
    void close_row() { set.offsets_.push_back(static_cast<std::uint32_t>(set.cands_.size())); }
};

PairSet PairSet::complete(std::size_t n_hat, std::size_t n_bar) {
    PairSetBuilder b(n_hat, n_hat * n_bar);
    const PairBounds open{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n_hat; ++i) {
        for (std::size_t j = 0; j < n_bar; ++j) b.push({static_cast<std::uint32_t>(j), open});
        b.close_row();
    }
    return std::move(b.set);
}

PairSet PairSet::from_lists(const std::vector<std::vector<Candidate>>& lists) {
    std::size_t total = 0;
    for (const auto& l : lists) total += l.size();
    PairSetBuilder b(lists.size(), total);
    for (const auto& l : lists) {
        for (std::size_t k = 0; k < l.size(); ++k) {
            if (k > 0 && l[k].j <= l[k - 1].j)
                throw InvalidArgument("PairSet: candidate indices must be strictly increasing");
            b.push(l[k]);
        }
        b.close_row();
    }
    return std::move(b.set);
}

bool PairSet::contains(std::size_t i, std::uint32_t j) const {
    const auto c = candidates(i);
    const auto it = std::lower_bound(c.begin(), c.end(), j, [](const Candidate& a, std::uint32_t v) { return a.j < v; });
    return it != c.end() && it->j == j;
}

void bound_pairs(PairSet& pairs, PolytopeCache& hat_cache, PolytopeCache& bar_cache) {
    for (std::size_t i = 0; i < pairs.n_hat(); ++i) {
        const VertexSet& vh = hat_cache.vertices(i);
        for (auto& c : pairs.candidates(i)) c.bounds = conservative(pair_bounds(vh, bar_cache.vertices(c.j)));
    }
}

void bound_pairs(PairSet& pairs, const Cloud& hat, const Cloud& bar, const AngleBox& box) {
    PolytopeCache hc(hat, box);
    PolytopeCache bc(bar, box);
    bound_pairs(pairs, hc, bc);
}

ReductionResult reduce_pairs(const PairSet& pairs, double f_upper) {
    ReductionResult res;
    res.stats.before = pairs.size();
    PairSetBuilder b(pairs.n_hat(), pairs.size());

    std::vector<Candidate> kept;
    for (std::size_t i = 0; i < pairs.n_hat(); ++i) {
        kept.clear();
        // k ranges over all of B(i): a removed k still certifies that j is not closest.
        double min_hi = std::numeric_limits<double>::infinity();
        for (const auto& c : pairs.candidates(i)) {
            min_hi = std::min(min_hi, c.bounds.c_hi);
            if (c.bounds.c_lo > f_upper)
                ++res.stats.removed_objective;
            else
                kept.push_back(c);
        }
        std::size_t row = 0;
        for (const auto& c : kept) {
            if (c.bounds.c_lo > min_hi) {
                ++res.stats.removed_closest;
            } else {
                b.push(c);
                ++row;
            }
        }
        b.close_row();
        if (row == 0) res.infeasible = true;
    }
    res.pairs = std::move(b.set);
    res.stats.after = res.pairs.size();
    return res;
}

}  // namespace boresight
