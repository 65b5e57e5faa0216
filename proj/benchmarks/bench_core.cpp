#include "overtaking/casebook.hpp"
#include "overtaking/det_blackwell.hpp"
#include "overtaking/evaluate.hpp"
#include "overtaking/horizon.hpp"
#include "overtaking/mdp.hpp"
#include "overtaking/spectral.hpp"
#include "overtaking/strategy.hpp"

#include <benchmark/benchmark.h>

using namespace overtaking;

namespace {

void BM_ReachCurve(benchmark::State& state) {
    const Mdp m = sample_generic(static_cast<std::size_t>(state.range(0)), 3, 1);
    const auto sigma = StationaryStrategy::uniform(m);
    const auto horizon = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(reach_curve(m, sigma, 0, horizon));
}
BENCHMARK(BM_ReachCurve)->Args({5, 1000})->Args({5, 10000})->Args({20, 1000});

void BM_PerronRoot(benchmark::State& state) {
    const Mdp m = sample_generic(static_cast<std::size_t>(state.range(0)), 2, 2);
    const auto reduced = reduced_matrix(induced_matrix(m, StationaryStrategy::uniform(m)));
    for (auto _ : state) benchmark::DoNotOptimize(perron_root(reduced));
}
BENCHMARK(BM_PerronRoot)->Arg(5)->Arg(20)->Arg(50);

void BM_GenericityCheck(benchmark::State& state) {
    const Mdp m = sample_generic(static_cast<std::size_t>(state.range(0)), 3, 3);
    for (auto _ : state) benchmark::DoNotOptimize(genericity_check(m));
}
BENCHMARK(BM_GenericityCheck)->Arg(4)->Arg(6);

void BM_CertifiedHorizon(benchmark::State& state) {
    const Mdp m = sample_generic(5, 3, 4);
    const auto [best, report] = best_pure_stationary(m);
    const auto other = StationaryStrategy::uniform(m);
    for (auto _ : state) benchmark::DoNotOptimize(certified_horizon(m, best, other));
}
BENCHMARK(BM_CertifiedHorizon);

void BM_PathCheck(benchmark::State& state) {
    const Mdp m = sample_deterministic(5, 3, 7);
    const AverageMdp avg = to_average_mdp(m);
    const auto sigma = lift_policy(m, avg, blackwell_optimal(avg));
    const auto horizon = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(not_weakly_overtaken_check(m, sigma, horizon, horizon / 2));
}
BENCHMARK(BM_PathCheck)->Arg(12)->Arg(20);

void BM_Casebook(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(check_claims(300));
}
BENCHMARK(BM_Casebook)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
