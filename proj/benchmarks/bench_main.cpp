#include "pks/pks_bounds.hpp"
#include "pks/simulator.hpp"
#include "pks/specialfn.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

void BM_g_one(benchmark::State& state) {
    const double r = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pks::g_one(r));
    }
}
BENCHMARK(BM_g_one)->Arg(1)->Arg(10)->Arg(100);

void BM_g_one_inv(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(pks::g_one_inv(1e-3));
    }
}
BENCHMARK(BM_g_one_inv);

void BM_t_star_alpha(benchmark::State& state) {
    const double mass = 16.0 * pks::kPi;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pks::t_star_alpha(mass, 1.0, 0.3));
    }
}
BENCHMARK(BM_t_star_alpha);

void BM_simulator_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    pks::SimConfig cfg;
    cfg.grid = {5.0, n, n};
    const pks::Density d = pks::Density::from_primitives({pks::Gaussian{{}, 0.6, 4.0 * pks::kPi}});
    pks::Simulator sim(cfg, pks::rasterize(d, 5.0, n, n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim.step(sim.max_stable_dt()));
    }
}
BENCHMARK(BM_simulator_step)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
