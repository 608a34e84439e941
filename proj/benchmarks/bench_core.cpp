#include <random>

#include <benchmark/benchmark.h>

#include "boresight/reduce.hpp"
#include "boresight/relax.hpp"
#include "boresight/search.hpp"
#include "boresight/spatial.hpp"

using namespace boresight;

namespace {

SynthScene make_scene(std::size_t n_hat, std::size_t n_bar) {
    SynthConfig cfg;
    cfg.n_hat = n_hat;
    cfg.n_bar = n_bar;
    cfg.noise_sigma = 0.01;
    cfg.boresight = EulerAngles::from_degrees(1, -0.5, 0.25);
    return synth_generate(cfg);
}

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-50, 50);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
    return pts;
}

void BM_NearestQuery(benchmark::State& state) {
    const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1);
    const auto queries = random_points(1024, 2);
    const auto idx = build_index(pts);
    std::size_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(nearest_sq_dist(idx, queries[k++ & 1023]));
}
BENCHMARK(BM_NearestQuery)->Arg(500)->Arg(5000)->Arg(50000);

void BM_GjkPolytopes(benchmark::State& state) {
    const auto scene = make_scene(10, 20);
    const AngleBox box = AngleBox::symmetric_degrees(state.range(0) / 100.0);
    PolytopeCache hc(scene.hat, box), bc(scene.bar, box);
    const auto& a = hc.vertices(0);
    const auto& b = bc.vertices(5);
    for (auto _ : state) benchmark::DoNotOptimize(gjk_distance(a, b));
}
BENCHMARK(BM_GjkPolytopes)->Arg(200)->Arg(10);

void BM_BuildPolytope(benchmark::State& state) {
    const Vec3 l(4, 15, -38);
    const auto rot = rotation_interval(AngleBox::symmetric_degrees(2.0));
    for (auto _ : state) benchmark::DoNotOptimize(build_polytope(l, rot));
}
BENCHMARK(BM_BuildPolytope);

void BM_EvaluateUb(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto scene = make_scene(n, 2 * n);
    const auto a = EulerAngles::from_degrees(0.9, -0.4, 0.2);
    for (auto _ : state) benchmark::DoNotOptimize(objective_at(scene.hat, scene.bar, a));
}
BENCHMARK(BM_EvaluateUb)->Arg(200)->Arg(2000);

void BM_BoundAndReduce(benchmark::State& state) {
    const auto scene = make_scene(50, 120);
    const AngleBox box = AngleBox::around(EulerAngles::from_degrees(1, -0.5, 0.25), deg_to_rad(0.25));
    const double f_upper = objective_at(scene.hat, scene.bar, box.midpoint());
    for (auto _ : state) {
        PairSet p = PairSet::complete(50, 120);
        bound_pairs(p, scene.hat, scene.bar, box);
        benchmark::DoNotOptimize(reduce_pairs(p, f_upper));
    }
}
BENCHMARK(BM_BoundAndReduce)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
