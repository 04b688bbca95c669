#include <benchmark/benchmark.h>

#include "exkin/abm.hpp"

using namespace exkin;

static void BM_StepEvent(benchmark::State& state) {
    const ModelParams params{state.range(0), 10.0, 0.4, 1.0};
    AgentEnsemble e = init_ensemble(params);
    Xoshiro256pp rng(1);
    for (auto _ : state) {
        step_event(e, rng, params.lambda, TimeMode::EventCount);
        benchmark::DoNotOptimize(e.bank_cash);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepEvent)->Arg(100)->Arg(10000)->Arg(1000000);

static void BM_EmpiricalPmf(benchmark::State& state) {
    const ModelParams params{state.range(0), 10.0, 0.4, 1.0};
    AgentEnsemble e = init_ensemble(params);
    Xoshiro256pp rng(2);
    for (int k = 0; k < 200000; ++k) step_event(e, rng, params.lambda, TimeMode::EventCount);
    for (auto _ : state) {
        const WealthPMF p = empirical_pmf(e);
        benchmark::DoNotOptimize(p.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalPmf)->Arg(10000)->Arg(100000);

static void BM_Run1e5Events(benchmark::State& state) {
    RunConfig cfg;
    cfg.params = {state.range(0), 10.0, 0.4, 1.0};
    cfg.max_events = 100000;
    cfg.seed = 3;
    cfg.record_stride = 100000;  // pure event loop, no sampling in the way
    for (auto _ : state) {
        const RunResult res = run(cfg);
        benchmark::DoNotOptimize(res.final_state.bank_cash);
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_Run1e5Events)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
