#include <benchmark/benchmark.h>

#include "toedit/simulator.hpp"

using namespace toedit;

namespace {

void BM_RidgelessFit(benchmark::State& state) {
    sim::SimConfig cfg;
    cfg.d = static_cast<std::size_t>(state.range(0));
    cfg.T = 10 * cfg.d;
    auto rng = make_rng(1, "bench");
    const auto data = sim::make_dataset(cfg, rng);
    const sim::Vector y = data.X * data.w_star + data.E1;
    for (auto _ : state) benchmark::DoNotOptimize(sim::fit_ridgeless(data.X, y));
}
BENCHMARK(BM_RidgelessFit)->Arg(10)->Arg(50);

void BM_CollapseProcess(benchmark::State& state) {
    sim::SimConfig cfg;
    cfg.trials = 100;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_collapse_process(cfg));
}
BENCHMARK(BM_CollapseProcess)->Unit(benchmark::kMillisecond);

}  // namespace
