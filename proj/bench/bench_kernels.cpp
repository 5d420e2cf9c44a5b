#include "revorbit/kernels.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

using namespace revorbit;

std::shared_ptr<const Surface> sphere() {
    static const auto s = std::make_shared<const Surface>(make_constant_curvature(1.0, 0.0, 1.0));
    return s;
}

std::shared_ptr<const Surface> torus() {
    static const auto s = std::make_shared<const Surface>(make_torus(2.0, 1.0));
    return s;
}

struct Sweep {
    EffectiveProfile w;
    CircularOrbit c;
    std::vector<double> energies;
};

Sweep make_sweep(int n) {
    const auto s = sphere();
    EffectiveProfile w(s, harmonic(1.0, s), 1.0);
    const CircularOrbit c = stable_circular_orbit(w);
    return {w, c, energy_grid(w, c, n)};
}

void BM_ApsidalSweepSerial(benchmark::State& state) {
    const Sweep sw = make_sweep(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::apsidal_sweep_serial(sw.w, sw.energies, sw.c.u0));
}

void BM_ApsidalSweepParallel(benchmark::State& state) {
    const Sweep sw = make_sweep(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::apsidal_sweep_parallel(sw.w, sw.energies, sw.c.u0));
}

void BM_QuarticGridSerial(benchmark::State& state) {
    const auto grid = torus()->interior_grid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::quartic_grid_serial(*torus(), grid));
}

void BM_QuarticGridParallel(benchmark::State& state) {
    const auto grid = torus()->interior_grid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::quartic_grid_parallel(*torus(), grid));
}

void BM_LaplaceBeltramiSerial(benchmark::State& state) {
    const auto grid = torus()->interior_grid(static_cast<int>(state.range(0)));
    const CentralPotential p = gravitational(1.0, torus());
    for (auto _ : state) benchmark::DoNotOptimize(kernels::laplace_beltrami_serial(p, *torus(), grid));
}

void BM_LaplaceBeltramiParallel(benchmark::State& state) {
    const auto grid = torus()->interior_grid(static_cast<int>(state.range(0)));
    const CentralPotential p = gravitational(1.0, torus());
    for (auto _ : state) benchmark::DoNotOptimize(kernels::laplace_beltrami_parallel(p, *torus(), grid));
}

} // namespace

BENCHMARK(BM_ApsidalSweepSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApsidalSweepParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuarticGridSerial)->Arg(1024)->Arg(16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_QuarticGridParallel)->Arg(1024)->Arg(16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LaplaceBeltramiSerial)->Arg(1024)->Arg(16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LaplaceBeltramiParallel)->Arg(1024)->Arg(16384)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
