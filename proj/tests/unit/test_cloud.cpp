#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "boresight/cloud.hpp"
#include "boresight/errors.hpp"
#include "boresight/search.hpp"

using namespace boresight;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("boresight_test_" + std::to_string(::getpid()) + "_" + name);
}

ScanPoint make_point(Vec3 l, EulerAngles att, Vec3 s) {
    ScanPoint p;
    p.l = l;
    p.ins_rotation = rotation_from_angles(att);
    p.s = s;
    return p;
}

}  // namespace

TEST(Fused, ReadsWellFormedFile) {
    std::istringstream in(
        "# comment\n"
        "lx,ly,lz,roll_deg,pitch_deg,yaw_deg,sx,sy,sz\n"
        "1,2,3,0,0,0,0,0,0\n"
        "# another\n"
        "4,5,6,1.5,-2,179,10,20,30\n"
        "7,8,9,0,0,90,0,0,0\n");
    const Cloud c = read_fused(in);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].l, Vec3(1, 2, 3));
    EXPECT_EQ(c[1].s, Vec3(10, 20, 30));
    EXPECT_LT((c[1].ins_rotation - rotation_from_angles(EulerAngles::from_degrees(1.5, -2, 179))).norm(), 1e-15);
}

TEST(Fused, ShortRowNamesTheLine) {
    std::istringstream in(
        "lx,ly,lz,roll_deg,pitch_deg,yaw_deg,sx,sy,sz\n"
        "1,2,3,0,0,0,0,0,0\n"
        "1,2,3,0,0,0,0,0\n");
    try {
        read_fused(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("found 8"), std::string::npos);
    }
}

TEST(Fused, RejectsBadInput) {
    std::istringstream no_header("1,2,3,0,0,0,0,0,0\n");
    EXPECT_THROW(read_fused(no_header), ParseError);
    std::istringstream bad_number("lx,ly,lz,roll_deg,pitch_deg,yaw_deg,sx,sy,sz\n1,2,x,0,0,0,0,0,0\n");
    EXPECT_THROW(read_fused(bad_number), ParseError);
    std::istringstream non_finite("lx,ly,lz,roll_deg,pitch_deg,yaw_deg,sx,sy,sz\n1,2,inf,0,0,0,0,0,0\n");
    EXPECT_THROW(read_fused(non_finite), ParseError);
    EXPECT_THROW(load_fused("/nonexistent/path.csv"), ParseError);
}

TEST(Fused, SaveLoadRoundTrip) {
    SynthConfig cfg;
    cfg.n_hat = 50;
    cfg.n_bar = 80;
    cfg.ground_hat = 20;
    cfg.noise_sigma = 0.01;
    cfg.seed = 3;
    const auto scene = synth_generate(cfg);
    const auto path = temp_file("roundtrip.csv");
    save_fused(scene.hat, path);
    const Cloud back = load_fused(path);
    std::filesystem::remove(path);
    ASSERT_EQ(back.size(), scene.hat.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_LE((back[i].l - scene.hat[i].l).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE((back[i].s - scene.hat[i].s).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE((back[i].ins_rotation - scene.hat[i].ins_rotation).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Georeference, IdentityPose) {
    Cloud c;
    c.points.push_back(make_point({1, 2, 3}, {}, Vec3::Zero()));
    EXPECT_EQ(georeference(c, {})[0], Vec3(1, 2, 3));
}

TEST(Georeference, QuarterTurnBoresight) {
    Cloud c;
    c.points.push_back(make_point({0, 1, 0}, {}, {10, 0, 0}));
    const Vec3 p = georeference(c, EulerAngles::from_degrees(90, 0, 0))[0];
    EXPECT_LT((p - Vec3(10, 0, 1)).norm(), 1e-15);
}

TEST(Georeference, TranslationEquivariant) {
    SynthConfig cfg;
    cfg.n_hat = 30;
    cfg.n_bar = 30;
    auto scene = synth_generate(cfg);
    const auto angles = EulerAngles::from_degrees(0.5, 0.2, -0.1);
    const auto before = georeference(scene.hat, angles);
    const Vec3 shift(3, -4, 5);
    for (auto& p : scene.hat.points) p.s += shift;
    const auto after = georeference(scene.hat, angles);
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_LT((after[i] - before[i] - shift).norm(), 1e-12);
}

TEST(Crop, KeepsEverythingOrNothing) {
    SynthConfig cfg;
    cfg.n_hat = 40;
    cfg.n_bar = 40;
    const auto scene = synth_generate(cfg);
    const CropBox all{Vec3::Constant(-1e6), Vec3::Constant(1e6)};
    EXPECT_EQ(crop(scene.hat, all).size(), scene.hat.size());
    const CropBox far{Vec3::Constant(1e5), Vec3::Constant(1e5 + 1)};
    EXPECT_THROW(crop(scene.hat, far), EmptySelection);
    const CropBox inverted{Vec3::Constant(1), Vec3::Constant(0)};
    EXPECT_THROW(crop(scene.hat, inverted), InvalidArgument);
}

TEST(Crop, SelectsTaggedObjectPoints) {
    SynthConfig cfg;
    cfg.n_hat = 120;
    cfg.n_bar = 200;
    cfg.ground_hat = 300;
    cfg.ground_bar = 300;
    cfg.boresight = EulerAngles::from_degrees(1, -0.5, 0.25);
    cfg.seed = 9;
    const auto scene = synth_generate(cfg);
    EXPECT_EQ(crop_indices(scene.hat, scene.truth.object_box, cfg.boresight), scene.truth.hat_object);
    EXPECT_EQ(crop_indices(scene.bar, scene.truth.object_box, cfg.boresight), scene.truth.bar_object);
}

TEST(Decimate, SubsetInOrder) {
    SynthConfig cfg;
    cfg.n_hat = 100;
    cfg.n_bar = 100;
    const auto scene = synth_generate(cfg);
    const Cloud d = decimate(scene.hat, 30, 5);
    ASSERT_EQ(d.size(), 30u);
    std::size_t k = 0;
    for (const auto& p : d.points) {
        while (k < scene.hat.size() && scene.hat[k].l != p.l) ++k;
        ASSERT_LT(k, scene.hat.size()) << "decimated point not found in order";
    }
    EXPECT_EQ(decimate(scene.hat, 500, 5).size(), scene.hat.size());
}

TEST(Synth, NoiseFreeGeoreferenceLandsOnObject) {
    for (auto layout : {LineLayout::Opposite, LineLayout::Crossing}) {
        SynthConfig cfg;
        cfg.n_hat = 100;
        cfg.n_bar = 150;
        cfg.ground_hat = 50;
        cfg.boresight = EulerAngles::from_degrees(1, -0.5, 0.25);
        cfg.layout = layout;
        const auto scene = synth_generate(cfg);
        const auto ph = georeference(scene.hat, cfg.boresight);
        const auto pb = georeference(scene.bar, cfg.boresight);
        for (std::size_t i = 0; i < ph.size(); ++i) EXPECT_LE((ph[i] - scene.hat_world[i]).norm(), 1e-9);
        for (std::size_t i = 0; i < pb.size(); ++i) EXPECT_LE((pb[i] - scene.bar_world[i]).norm(), 1e-9);
    }
}

TEST(Synth, SharedSurfaceHasZeroObjectiveAtTruth) {
    SynthConfig cfg;
    cfg.n_hat = 100;
    cfg.n_bar = 250;
    cfg.shared_surface = true;
    cfg.boresight = EulerAngles::from_degrees(1, -0.5, 0.25);
    const auto scene = synth_generate(cfg);
    EXPECT_LE(objective_at(scene.hat, scene.bar, cfg.boresight), 1e-12 * 100);
    EXPECT_GT(objective_at(scene.hat, scene.bar, EulerAngles{}), 1.0);
}

TEST(Synth, Deterministic) {
    SynthConfig cfg;
    cfg.n_hat = 60;
    cfg.n_bar = 90;
    cfg.noise_sigma = 0.02;
    cfg.seed = 42;
    const auto a = synth_generate(cfg);
    const auto b = synth_generate(cfg);
    std::ostringstream sa, sb;
    write_fused(a.hat, sa);
    write_fused(b.hat, sb);
    write_fused(a.bar, sa);
    write_fused(b.bar, sb);
    EXPECT_EQ(sa.str(), sb.str());
    cfg.seed = 43;
    std::ostringstream sc;
    write_fused(synth_generate(cfg).hat, sc);
    EXPECT_NE(sc.str().substr(0, 2000), sa.str().substr(0, 2000));
}

TEST(Synth, InvalidConfig) {
    SynthConfig cfg;
    cfg.n_hat = 10;
    cfg.n_bar = 5;
    EXPECT_THROW(synth_generate(cfg), InvalidArgument);
    cfg.n_bar = 20;
    cfg.noise_sigma = -1;
    EXPECT_THROW(synth_generate(cfg), InvalidArgument);
    cfg.noise_sigma = 0;
    cfg.n_hat = 0;
    EXPECT_THROW(synth_generate(cfg), InvalidArgument);
}

TEST(Synth, GroundTruthRoundTrip) {
    SynthConfig cfg;
    cfg.n_hat = 40;
    cfg.n_bar = 60;
    cfg.ground_hat = 10;
    cfg.shared_surface = true;
    cfg.layout = LineLayout::Crossing;
    cfg.boresight = EulerAngles::from_degrees(1, -0.5, 0.25);
    const auto scene = synth_generate(cfg);
    const auto path = temp_file("truth.txt");
    save_ground_truth(scene.truth, path);
    const auto t = load_ground_truth(path);
    std::filesystem::remove(path);
    EXPECT_NEAR(t.boresight.alpha, cfg.boresight.alpha, 1e-15);
    EXPECT_NEAR(t.boresight.gamma, cfg.boresight.gamma, 1e-15);
    EXPECT_TRUE(t.shared_surface);
    EXPECT_EQ(t.layout, LineLayout::Crossing);
    EXPECT_EQ(t.hat_object, scene.truth.hat_object);
    EXPECT_EQ(t.bar_object, scene.truth.bar_object);
    EXPECT_EQ(t.object_box.min, scene.truth.object_box.min);
}
