// Serial reference vs OpenMP kernels. Each pair runs the same work, so the
// ratio of the two times is the parallel speedup on this machine.
#include <benchmark/benchmark.h>

#include "peaky/exponents.hpp"
#include "peaky/montecarlo.hpp"

namespace {

using namespace peaky;

Scenario scenario(Scheme s, Coherence c, int M, double nu, double K, double snr) {
    ModulationSpec mod(s, M, nu);
    return {mod, FadingSpec::from_rician(c, K, 1.0), LinkOperatingPoint::from_snr(snr, mod)};
}

const Scenario kLink = scenario(Scheme::Oopsk, Coherence::Noncoherent, 8, 0.3, 5.0, 10.0);

void BM_SimulateSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(kLink, state.range(0), 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(simulate(kLink, state.range(0), 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_SimulateSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void e0_grid(benchmark::State& state, const Scenario& sc, bool serial) {
    ExponentOptions o;
    o.serial = serial;
    const auto rhos = rho_grid(21);
    for (auto _ : state) benchmark::DoNotOptimize(e0_batch(rhos, sc, o));
}

const Scenario kPsk = scenario(Scheme::Oopsk, Coherence::Noncoherent, 16, 0.4, 1.0, 1.0);
const Scenario kFsk = scenario(Scheme::Oofsk, Coherence::Noncoherent, 3, 0.4, 5.0, 0.1);

BENCHMARK_CAPTURE(e0_grid, oopsk16_serial, kPsk, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(e0_grid, oopsk16_parallel, kPsk, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(e0_grid, oofsk3_serial, kFsk, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(e0_grid, oofsk3_parallel, kFsk, false)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
