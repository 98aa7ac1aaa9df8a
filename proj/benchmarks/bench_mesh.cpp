#include <benchmark/benchmark.h>

#include <map>

#include "warpgeom/dgeom.hpp"
#include "warpgeom/harness.hpp"
#include "warpgeom/surfaces.hpp"

using namespace warpgeom;

namespace {

const TriMesh& catenoid(int res) {
    static std::map<int, TriMesh> cache;
    auto it = cache.find(res);
    if (it == cache.end()) it = cache.emplace(res, tessellate(builtin_surface("catenoid"), res, res)).first;
    return it->second;
}

}  // namespace

static void BM_Tessellate(benchmark::State& state) {
    const auto s = builtin_surface("catenoid");
    const int res = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(tessellate(s, res, res).face_count());
    state.SetComplexityN(res * res);
}
BENCHMARK(BM_Tessellate)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_Clip(benchmark::State& state) {
    const auto& mesh = catenoid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(clip(mesh, 1.5, 6.0).face_count());
}
BENCHMARK(BM_Clip)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond);

static void BM_CapacitySolve(benchmark::State& state) {
    const auto annulus = clip(catenoid(static_cast<int>(state.range(0))), 1.5, 6.0);
    for (auto _ : state) benchmark::DoNotOptimize(capacity_discrete(annulus).capacity);
    state.counters["vertices"] = static_cast<double>(annulus.vertex_count());
}
BENCHMARK(BM_CapacitySolve)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond);

static void BM_FirstEigenvalue(benchmark::State& state) {
    const auto ball = clip(catenoid(128), 0.0, 3.0);
    for (auto _ : state) benchmark::DoNotOptimize(first_eigenvalue_estimate(ball).lambda);
}
BENCHMARK(BM_FirstEigenvalue)->Unit(benchmark::kMillisecond);

static void BM_QuotientCurve(benchmark::State& state) {
    const auto& mesh = catenoid(192);
    const ModelSpace flat(2, Warping::space_form(0.0));
    const auto grid = RadiusGrid::linspace(2.0, 20.0, 19);
    HarnessOptions opts;
    opts.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(quotient_curves(mesh, flat, grid, opts).volume_sup());
}
BENCHMARK(BM_QuotientCurve)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
