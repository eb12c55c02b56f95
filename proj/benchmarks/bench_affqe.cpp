#include "affqe/extension.hpp"
#include "affqe/killing.hpp"
#include "affqe/registry.hpp"

#include <benchmark/benchmark.h>

using namespace affqe;

static void BM_SolveTypeA(benchmark::State& st) {
    const SurfaceModel m = load_model("M1");
    for (auto _ : st) benchmark::DoNotOptimize(solve(m, -1.0));
}
BENCHMARK(BM_SolveTypeA);

static void BM_SolveTypeB(benchmark::State& st) {
    const SurfaceModel m = load_model("N4");
    for (auto _ : st) benchmark::DoNotOptimize(solve(m, -1.0));
}
BENCHMARK(BM_SolveTypeB);

static void BM_KillingDimension(benchmark::State& st) {
    const SurfaceModel m = load_model("Z1");
    for (auto _ : st) benchmark::DoNotOptimize(killing_dimension(m));
}
BENCHMARK(BM_KillingDimension);

static void BM_Classify(benchmark::State& st) {
    const SurfaceModel m = make_type_b({0.3, -1.2, 0.7, 2, -0.4, 1.1});
    for (auto _ : st) benchmark::DoNotOptimize(classify(m));
}
BENCHMARK(BM_Classify);

static void BM_Geometry4D(benchmark::State& st) {
    const SurfaceModel base = load_model("N4");
    const ExtensionMetric g = build_extension(base, ricci_phi(base));
    for (auto _ : st) benchmark::DoNotOptimize(geometry_4d(g, {1.0, 0.2, 0.3, -0.4}));
}
BENCHMARK(BM_Geometry4D);

static void BM_VerifyPaper(benchmark::State& st) {
    const auto& entries = registry();
    for (auto _ : st) benchmark::DoNotOptimize(verify_entries(entries));
}
BENCHMARK(BM_VerifyPaper)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
