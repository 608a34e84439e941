#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "boresight/errors.hpp"
#include "boresight/rotation.hpp"
#include "oracles.hpp"

using namespace boresight;

namespace {

double max_abs_diff(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff(); }

EulerAngles random_angles(std::mt19937_64& rng, double max_deg) {
    std::uniform_real_distribution<double> u(-max_deg, max_deg);
    return EulerAngles::from_degrees(u(rng), u(rng), u(rng));
}

AngleBox random_box(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-20.0, 20.0), w(0.0, 8.0);
    std::array<Interval, 3> ax;
    for (auto& a : ax) {
        const double lo = c(rng);
        a = {deg_to_rad(lo), deg_to_rad(lo + w(rng))};
    }
    return AngleBox(ax[0], ax[1], ax[2]);
}

}  // namespace

TEST(Rotation, ZeroAnglesGiveIdentity) {
    EXPECT_EQ(rotation_from_angles({0, 0, 0}), Mat3::Identity());
}

TEST(Rotation, QuarterTurnAboutX) {
    Mat3 expected;
    expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    EXPECT_LT(max_abs_diff(rotation_from_angles(EulerAngles::from_degrees(90, 0, 0)), expected), 1e-15);
}

TEST(Rotation, CarAnglesMatchClosedForm) {
    const auto a = EulerAngles::from_degrees(-1.434, 0.940, -0.282);
    EXPECT_LT(max_abs_diff(rotation_from_angles(a), oracle::rotation(a.alpha, a.beta, a.gamma)), 1e-15);
}

TEST(Rotation, NonFiniteInputRejected) {
    EXPECT_THROW(rotation_from_angles({std::nan(""), 0, 0}), InvalidArgument);
    EXPECT_THROW(rotation_from_angles({0, INFINITY, 0}), InvalidArgument);
}

TEST(Rotation, OrthonormalAndMatchesClosedForm) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 1000; ++k) {
        const auto a = random_angles(rng, 179.0);
        const Mat3 r = rotation_from_angles(a);
        EXPECT_LE((r.transpose() * r - Mat3::Identity()).cwiseAbs().rowwise().sum().maxCoeff(), 1e-12);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
        EXPECT_LE(max_abs_diff(r, oracle::rotation(a.alpha, a.beta, a.gamma)), 1e-12);
    }
}

TEST(Rotation, QuadFormIdentity) {
    QuadRotation q;
    EXPECT_EQ(rotation_from_quad(q), Mat3::Identity());
}

TEST(Rotation, QuadFormMatchesTrigForm) {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 1000; ++k) {
        const auto a = random_angles(rng, 179.0);
        EXPECT_LE(max_abs_diff(rotation_from_quad(QuadRotation::from_angles(a)), rotation_from_angles(a)), 1e-12);
    }
}

TEST(Rotation, QuadFormPreconditions) {
    QuadRotation q;
    q.u_alpha = 0.99;
    q.v_alpha = 0.2;
    EXPECT_THROW(rotation_from_quad(q), InvalidArgument);

    q = QuadRotation::from_angles(EulerAngles::from_degrees(1, 2, 3));
    q.w_gb += 1e-6;
    EXPECT_THROW(rotation_from_quad(q), InvalidArgument);
}

TEST(Rotation, AnglesRoundTrip) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 200; ++k) {
        const auto a = random_angles(rng, 80.0);
        const auto b = angles_from_rotation(rotation_from_angles(a));
        EXPECT_NEAR(a.alpha, b.alpha, 1e-12);
        EXPECT_NEAR(a.beta, b.beta, 1e-12);
        EXPECT_NEAR(a.gamma, b.gamma, 1e-12);
    }
}

TEST(AngleBoxTest, Validation) {
    EXPECT_THROW(AngleBox({1, 0}, {0, 0}, {0, 0}), InvalidArgument);
    EXPECT_THROW(AngleBox({0, 4}, {0, 0}, {0, 0}), InvalidArgument);
    EXPECT_THROW(AngleBox({-2, 2}, {0, 0}, {0, 0}), InvalidArgument);
    EXPECT_THROW(AngleBox({0, NAN}, {0, 0}, {0, 0}), InvalidArgument);
    const auto b = AngleBox::symmetric_degrees(2.0);
    EXPECT_DOUBLE_EQ(b.alpha().hi, deg_to_rad(2.0));
    EXPECT_TRUE(b.contains(EulerAngles::from_degrees(2, -2, 0)));
    EXPECT_FALSE(b.contains(EulerAngles::from_degrees(2.1, 0, 0)));
}

TEST(TrigBoundsTest, SymmetricTwoDegrees) {
    const auto t = trig_bounds(AngleBox::symmetric_degrees(2.0));
    const double r = deg_to_rad(2.0);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(t.cos[k].lo, std::cos(r), 1e-15);
        EXPECT_LE(t.cos[k].lo, std::cos(r));
        EXPECT_EQ(t.cos[k].hi, 1.0);
        EXPECT_NEAR(t.sin[k].lo, -std::sin(r), 1e-15);
        EXPECT_NEAR(t.sin[k].hi, std::sin(r), 1e-15);
        EXPECT_LE(t.sin[k].lo, std::sin(-r));
        EXPECT_GE(t.sin[k].hi, std::sin(r));
    }
}

TEST(TrigBoundsTest, DegenerateBoxGivesPoints) {
    const auto a = EulerAngles::from_degrees(0.7, -1.3, 2.1);
    const auto t = trig_bounds(AngleBox::degenerate(a));
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(t.cos[k].lo, std::cos(a[k]));
        EXPECT_EQ(t.cos[k].hi, std::cos(a[k]));
        EXPECT_EQ(t.sin[k].lo, std::sin(a[k]));
        EXPECT_EQ(t.sin[k].hi, std::sin(a[k]));
    }
}

TEST(TrigBoundsTest, CriticalPointsInside) {
    const Interval x{deg_to_rad(80), deg_to_rad(100)};
    EXPECT_EQ(sin_range(x).hi, 1.0);
    const Interval y{deg_to_rad(-100), deg_to_rad(-80)};
    EXPECT_EQ(sin_range(y).lo, -1.0);
    const Interval z{deg_to_rad(170), deg_to_rad(179)};
    EXPECT_LE(cos_range(z).lo, std::cos(deg_to_rad(179)));
}

TEST(TrigBoundsTest, SampledAnglesEnclosed) {
    std::mt19937_64 rng(14);
    for (int b = 0; b < 50; ++b) {
        const AngleBox box = random_box(rng);
        const auto t = trig_bounds(box);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int s = 0; s < 2000; ++s) {
            EulerAngles a;
            for (int k = 0; k < 3; ++k) a[k] = box[k].lo + u(rng) * box[k].width();
            for (int k = 0; k < 3; ++k) {
                ASSERT_TRUE(t.cos[k].contains(std::cos(a[k])));
                ASSERT_TRUE(t.sin[k].contains(std::sin(a[k])));
            }
            ASSERT_TRUE(t.w_gb.contains(std::cos(a.gamma) * std::sin(a.beta)));
            ASSERT_TRUE(t.w_bg.contains(std::sin(a.beta) * std::sin(a.gamma)));
        }
    }
}

TEST(RotationIntervalTest, DegenerateBoxIsPointMatrix) {
    const auto a = EulerAngles::from_degrees(1.0, -0.5, 0.25);
    const auto ri = rotation_interval(AngleBox::degenerate(a));
    const Mat3 r = rotation_from_angles(a);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            EXPECT_TRUE(ri(i, j).contains(r(i, j)));
            EXPECT_LT(ri(i, j).width(), 1e-14);
        }
}

TEST(RotationIntervalTest, SampledRotationsEnclosed) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto ri = rotation_interval(AngleBox::symmetric_degrees(2.0));
    for (int s = 0; s < 10000; ++s) {
        const Mat3 r = rotation_from_angles(EulerAngles::from_degrees(u(rng), u(rng), u(rng)));
        ASSERT_TRUE(ri.contains(r));
    }
}

TEST(RotationIntervalTest, ChildrenInsideParent) {
    std::mt19937_64 rng(16);
    for (int b = 0; b < 30; ++b) {
        const AngleBox box = random_box(rng);
        const auto parent = rotation_interval(box);
        for (int c = 0; c < 8; ++c) {
            std::array<Interval, 3> ax;
            for (int k = 0; k < 3; ++k) {
                const double m = box[k].mid();
                ax[k] = (c >> k) & 1 ? Interval{m, box[k].hi} : Interval{box[k].lo, m};
            }
            const auto child = rotation_interval(AngleBox(ax[0], ax[1], ax[2]));
            for (int e = 0; e < 9; ++e) {
                // Outward rounding of the parent may differ by an ulp-scale inflation.
                EXPECT_GE(child.entries[e].lo, parent.entries[e].lo - 1e-14);
                EXPECT_LE(child.entries[e].hi, parent.entries[e].hi + 1e-14);
            }
        }
    }
}

TEST(RotationIntervalTest, ShrinkingBoxesConverge) {
    const auto a = EulerAngles::from_degrees(0.3, -1.1, 1.7);
    const Mat3 r = rotation_from_angles(a);
    double prev = INFINITY;
    for (double w : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const auto ri = rotation_interval(AngleBox::around(a, w));
        double widest = 0.0, off = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                widest = std::max(widest, ri(i, j).width());
                off = std::max(off, std::abs(ri(i, j).mid() - r(i, j)));
            }
        EXPECT_LT(widest, prev);
        EXPECT_LT(widest, 10 * w);
        EXPECT_LT(off, 10 * w);
        prev = widest;
    }
}
