// Serial vs OpenMP Monte Carlo engine, and the optimized factor convolution
// vs its gather-form reference.

#include <benchmark/benchmark.h>

#include "fracvol/montecarlo.hpp"
#include "fracvol/simulate.hpp"

using namespace fracvol;

namespace {

FsvModel bench_model() { return FsvModel{0.2, 0.1, -0.5, FouParams(0.3, 1.0), TanhMap{0.19}}; }

void run_engine(benchmark::State& state, Execution ex) {
    McConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    cfg.execution = ex;
    cfg.antithetic = true;
    CrnExperiment exp(1.0, cfg);
    exp.add(bench_model());
    exp.add_constant(0.2, -0.5);
    for (auto _ : state) {
        CrnResult r = exp.run(1.0, {0.9, 1.0, 1.1});
        benchmark::DoNotOptimize(r.estimate(0, 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EngineSerial(benchmark::State& s) { run_engine(s, Execution::serial); }
void BM_EngineParallel(benchmark::State& s) { run_engine(s, Execution::parallel); }
BENCHMARK(BM_EngineSerial)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EngineParallel)->Arg(4000)->Unit(benchmark::kMillisecond);

void run_factor(benchmark::State& state, bool reference) {
    PathGrid g;
    g.n_steps = static_cast<std::size_t>(state.range(0));
    g.dt = 1.0 / 256.0;
    const FactorSimulator sim(g, KernelSpec::fou(FouParams(0.3, 1.0)), HistoryMode::stationary);
    PathNormals nrm = sim.make_buffers();
    draw_normals(3, 0, g.dt, sim.plan().hist_sd, false, nrm);
    std::vector<double> z(g.n_steps + 1);
    for (auto _ : state) {
        if (reference)
            factor_path_reference(sim.plan(), nrm, z.data());
        else
            factor_path(sim.plan(), nrm, z.data());
        benchmark::DoNotOptimize(z.data());
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_FactorReference(benchmark::State& s) { run_factor(s, true); }
void BM_FactorOptimized(benchmark::State& s) { run_factor(s, false); }
BENCHMARK(BM_FactorReference)->Arg(256)->Arg(1024);
BENCHMARK(BM_FactorOptimized)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
