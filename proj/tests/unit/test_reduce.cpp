#include <random>

#include <gtest/gtest.h>

#include "boresight/errors.hpp"
#include "boresight/reduce.hpp"
#include "boresight/search.hpp"
#include "oracles.hpp"

using namespace boresight;

namespace {

PairSet toy(std::vector<std::vector<std::pair<double, double>>> rows) {
    std::vector<std::vector<Candidate>> lists;
    for (const auto& row : rows) {
        std::vector<Candidate> l;
        for (std::size_t j = 0; j < row.size(); ++j)
            l.push_back({static_cast<std::uint32_t>(j), {row[j].first, row[j].second}});
        lists.push_back(l);
    }
    return PairSet::from_lists(lists);
}

SynthScene small_scene(std::uint64_t seed, std::size_t n_hat, std::size_t n_bar) {
    SynthConfig cfg;
    cfg.n_hat = n_hat;
    cfg.n_bar = n_bar;
    cfg.noise_sigma = 0.01;
    cfg.boresight = EulerAngles::from_degrees(1, -0.5, 0.25);
    cfg.seed = seed;
    return synth_generate(cfg);
}

}  // namespace

TEST(PairSetTest, CompleteAndLists) {
    const auto p = PairSet::complete(3, 4);
    EXPECT_EQ(p.n_hat(), 3u);
    EXPECT_EQ(p.size(), 12u);
    EXPECT_TRUE(p.contains(2, 3));
    EXPECT_FALSE(p.contains(2, 4));
    EXPECT_TRUE(std::isinf(p.candidates(0)[0].bounds.c_hi));
    EXPECT_THROW(PairSet::from_lists({{{1, {}}, {1, {}}}}), InvalidArgument);
}

TEST(Reduce, InfiniteUpperKeepsUnboundedSet) {
    const auto r = reduce_pairs(PairSet::complete(5, 7), INFINITY);
    EXPECT_EQ(r.pairs.size(), 35u);
    EXPECT_FALSE(r.infeasible);
    EXPECT_EQ(r.stats.before, 35u);
    EXPECT_EQ(r.stats.after, 35u);
}

TEST(Reduce, ClosestPointRule) {
    // c(1,1) in [0,1], c(1,2) in [5,6]: the second pair can never be the closest.
    const auto r = reduce_pairs(toy({{{0, 1}, {5, 6}}}), INFINITY);
    ASSERT_EQ(r.pairs.size(), 1u);
    EXPECT_TRUE(r.pairs.contains(0, 0));
    EXPECT_EQ(r.stats.removed_closest, 1u);
    EXPECT_EQ(r.stats.removed_objective, 0u);
}

TEST(Reduce, TiesAreKept) {
    const auto r = reduce_pairs(toy({{{0, 2}, {2, 3}}}), INFINITY);
    EXPECT_EQ(r.pairs.size(), 2u);
}

TEST(Reduce, ObjectiveRuleAndInfeasibility) {
    auto r = reduce_pairs(toy({{{0, 1}, {0.5, 4}}, {{3, 4}}}), 2.0);
    EXPECT_TRUE(r.infeasible);
    EXPECT_EQ(r.stats.removed_objective, 1u);
    r = reduce_pairs(toy({{{0, 1}, {0.5, 4}}, {{1.5, 4}}}), 2.0);
    EXPECT_FALSE(r.infeasible);
    EXPECT_EQ(r.pairs.size(), 3u);
}

TEST(Reduce, Idempotent) {
    const auto scene = small_scene(4, 15, 30);
    PairSet p = PairSet::complete(15, 30);
    bound_pairs(p, scene.hat, scene.bar, AngleBox::around(EulerAngles::from_degrees(1, -0.5, 0.25), deg_to_rad(0.1)));
    const double f_u = objective_at(scene.hat, scene.bar, EulerAngles::from_degrees(1, -0.5, 0.25));
    const auto once = reduce_pairs(p, f_u);
    const auto twice = reduce_pairs(once.pairs, f_u);
    EXPECT_EQ(once.pairs.size(), twice.pairs.size());
    EXPECT_EQ(twice.stats.removed_closest + twice.stats.removed_objective, 0u);
    EXPECT_LT(once.pairs.size(), p.size());
}

TEST(Reduce, BoundsAreSoundAndNearestSurvives) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto scene = small_scene(seed, 10, 25);
        const auto center = EulerAngles::from_degrees(1, -0.5, 0.25);
        const AngleBox box = AngleBox::around(center, deg_to_rad(0.2));
        PairSet p = PairSet::complete(10, 25);
        bound_pairs(p, scene.hat, scene.bar, box);
        const auto red = reduce_pairs(p, INFINITY);
        ASSERT_FALSE(red.infeasible);

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int s = 0; s < 200; ++s) {
            EulerAngles a;
            for (int k = 0; k < 3; ++k) a[k] = box[k].lo + u(rng) * box[k].width();
            const auto ph = georeference(scene.hat, a);
            const auto pb = georeference(scene.bar, a);
            for (std::size_t i = 0; i < 10; ++i) {
                for (const auto& c : p.candidates(i)) {
                    const double d = (ph[i] - pb[c.j]).squaredNorm();
                    ASSERT_GE(d, c.bounds.c_lo - 1e-9);
                    ASSERT_LE(d, c.bounds.c_hi + 1e-9);
                }
                const auto nn = oracle::linear_scan(pb, ph[i]);
                bool kept = false;
                for (std::size_t j = 0; j < pb.size(); ++j)
                    if ((ph[i] - pb[j]).squaredNorm() == nn.sq_dist && red.pairs.contains(i, static_cast<std::uint32_t>(j)))
                        kept = true;
                ASSERT_TRUE(kept) << "seed " << seed << " hat " << i;
            }
        }
    }
}
