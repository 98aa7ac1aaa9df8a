#include <benchmark/benchmark.h>

#include "warpgeom/modelspace.hpp"
#include "warpgeom/wexpr.hpp"

using namespace warpgeom;

static void BM_ParseDifferentiate(benchmark::State& state) {
    for (auto _ : state) {
        auto e = wexpr::parse("sinh(r) * (1 + r^2)^(-1/2) + r^3/6");
        benchmark::DoNotOptimize(wexpr::differentiate(wexpr::differentiate(e)));
    }
}
BENCHMARK(BM_ParseDifferentiate);

// Parsed warps always go through adaptive quadrature.
static void BM_ModelCapacity(benchmark::State& state) {
    const ModelSpace m(2, Warping::from_text("sinh(r) + r^3"));
    for (auto _ : state) benchmark::DoNotOptimize(m.capacity(1.0, 4.0));
}
BENCHMARK(BM_ModelCapacity);

static void BM_ModelExitTime(benchmark::State& state) {
    const ModelSpace m(3, Warping::from_text("sinh(r)"));
    for (auto _ : state) benchmark::DoNotOptimize(m.mean_exit_time(3.0, 0.0));
}
BENCHMARK(BM_ModelExitTime);

static void BM_ToneLimit(benchmark::State& state) {
    const ModelSpace m(2, Warping::from_text("sinh(r)"));
    const auto grid = RadiusGrid::linspace(1.0, 30.0, 59);
    for (auto _ : state) benchmark::DoNotOptimize(m.tone_upper_limit(grid).reported);
}
BENCHMARK(BM_ToneLimit)->Unit(benchmark::kMillisecond);
