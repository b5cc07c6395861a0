#include <benchmark/benchmark.h>

#include "pesinlab/bowen.hpp"
#include "pesinlab/cocycle.hpp"
#include "pesinlab/domination.hpp"
#include "pesinlab/graph_transform.hpp"

using namespace pesinlab;
namespace b = pesinlab::builtin;

namespace {

const TorusPoint x0{0.2, 0.3};

void BM_LyapunovQR(benchmark::State& state) {
    const auto sys = make_system(b::perturbed_cat(0.05));
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum_qr(sys, x0, state.range(0)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LyapunovQR)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_BowenGrid(benchmark::State& state) {
    const auto sys = make_system(b::cat_map());
    BowenParams p;
    p.resolution = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bowen_ball_profile(sys, x0, 6, 0.1, p, 0));
}
BENCHMARK(BM_BowenGrid)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_BowenNestedMC(benchmark::State& state) {
    const auto sys = make_system(b::perturbed_cat(0.05));
    BowenParams p;
    p.method = BowenMethod::NestedMC;
    p.population = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bowen_ball_profile(sys, x0, 6, 0.1, p, 0));
}
BENCHMARK(BM_BowenNestedMC)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_DominationRatio(benchmark::State& state) {
    const auto sys = make_system(b::perturbed_cat(0.02));
    const auto along = oseledec_splitting_along(sys, 40, 1);
    for (auto _ : state) benchmark::DoNotOptimize(domination_ratio(sys, x0, along, 1, state.range(0)));
}
BENCHMARK(BM_DominationRatio)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DispersionTrace(benchmark::State& state) {
    const auto sys = make_system(b::perturbed_cat(0.02));
    const auto along = oseledec_splitting_along(sys, 40, 1);
    const auto graph = linear_graph(along(x0, 0), Matrix::Constant(1, 1, 0.3), 5e-6,
                                    static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(propagate_along_bowen(sys, 8, 0.02, graph, along));
}
BENCHMARK(BM_DispersionTrace)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
