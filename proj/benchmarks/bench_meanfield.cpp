#include <benchmark/benchmark.h>

#include <cmath>

#include "exkin/equilibrium.hpp"
#include "exkin/meanfield.hpp"

using namespace exkin;

namespace {

// equilibrium-shaped test distribution of a given window width
WealthPMF wide_pmf(std::int64_t width) {
    const auto [eq, pstar] = equilibrium_pmf(10.0, 0.4);
    std::vector<double> w(static_cast<std::size_t>(width));
    const int lo = -static_cast<int>(width) / 3;
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = equilibrium_prob(eq, lo + static_cast<int>(i)) + 1e-30;
    return WealthPMF::normalized(lo, std::move(w));
}

}  // namespace

static void BM_Q1Apply(benchmark::State& state) {
    const WealthPMF p = wide_pmf(state.range(0));
    for (auto _ : state) {
        const WealthVector r = q1_apply(p);
        benchmark::DoNotOptimize(r.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Q1Apply)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_Q2Apply(benchmark::State& state) {
    const WealthPMF p = wide_pmf(state.range(0));
    for (auto _ : state) {
        const WealthVector r = q2_apply(p);
        benchmark::DoNotOptimize(r.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Q2Apply)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_Rk4Step(benchmark::State& state) {
    const ModelParams params{0, 10.0, 0.4, 1.0};
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    MeanFieldState s;
    s.pmf = wide_pmf(state.range(0));
    s.phase = Phase::PhaseII;
    for (auto _ : state) {
        s = step(s, params, cfg);
        benchmark::DoNotOptimize(s.accumulated_debt);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rk4Step)->Arg(1024)->Arg(4096);

static void BM_Gini(benchmark::State& state) {
    const WealthPMF p = wide_pmf(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gini(p));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Gini)->Arg(1024)->Arg(8192);
