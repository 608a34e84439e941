#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "boresight/cloud.hpp"
#include "boresight/relax.hpp"

namespace boresight {

struct Candidate {
    std::uint32_t j = 0;
    PairBounds bounds{};
};

/// Candidate correspondences B: for each hat point i, the admissible bar points j
/// (ascending) with their distance bounds. Stored contiguously per i.
class PairSet {
public:
    PairSet() = default;

    /// Every (i, j) with unbounded bounds [0, +inf).
    static PairSet complete(std::size_t n_hat, std::size_t n_bar);
    /// Builds from explicit per-i candidate lists; j must be strictly increasing per i.
    static PairSet from_lists(const std::vector<std::vector<Candidate>>& lists);

    std::size_t n_hat() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t size() const noexcept { return cands_.size(); }
    std::span<const Candidate> candidates(std::size_t i) const {
        return {cands_.data() + offsets_[i], cands_.data() + offsets_[i + 1]};
    }
    std::span<Candidate> candidates(std::size_t i) {
        return {cands_.data() + offsets_[i], cands_.data() + offsets_[i + 1]};
    }
    bool contains(std::size_t i, std::uint32_t j) const;

private:
    std::vector<std::uint32_t> offsets_;
    std::vector<Candidate> cands_;
    friend struct PairSetBuilder;
};

/// Recomputes conservative bounds for every retained pair over `box`, using
/// per-cloud polytope caches.
void bound_pairs(PairSet& pairs, PolytopeCache& hat_cache, PolytopeCache& bar_cache);
void bound_pairs(PairSet& pairs, const Cloud& hat, const Cloud& bar, const AngleBox& box);

struct ReductionStats {
    std::size_t before = 0;
    std::size_t after = 0;
    std::size_t removed_objective = 0;  ///< c_lo > f_upper
    std::size_t removed_closest = 0;    ///< c_lo > min_k c_hi(i, k)
};

struct ReductionResult {
    PairSet pairs;
    ReductionStats stats;
    bool infeasible = false;  ///< some hat point lost every candidate
};

/// Removes (i, j) when c_lo(i,j) > f_upper, then when c_lo(i,j) exceeds the
/// smallest c_hi(i,k) over the candidates of i. Ties are kept.
ReductionResult reduce_pairs(const PairSet& pairs, double f_upper);

}  // namespace boresight
