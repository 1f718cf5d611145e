#include <benchmark/benchmark.h>

#include "shelab/factorization.hpp"
#include "shelab/noise.hpp"
#include "shelab/solver.hpp"

using namespace shelab;

static void BM_NoiseIncrement(benchmark::State& st) {
  const LatticeGrid g{3, static_cast<int>(st.range(0)), 16.0};
  const NoiseSampler s = build_sampler({BesselCorrelation{2.0}, 3, 1.0}, g, 1);
  std::vector<double> out;
  std::vector<cplx> scratch;
  std::uint64_t step = 0;
  for (auto _ : st) {
    sample_increment(s, 5e-3, 0, step++, out, scratch);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_NoiseIncrement)->Arg(16)->Arg(32);

// Ten PAM steps per iteration on a 3-d lattice.
static void BM_SolverSteps(benchmark::State& st) {
  const LatticeGrid g{3, static_cast<int>(st.range(0)), 16.0};
  const NoiseSampler s = build_sampler({BesselCorrelation{2.0}, 3, 1.0}, g, 1);
  const FieldState s0 = init_state(InitialDatum::constant_density(1.0), g, 1);
  SolverConfig c;
  c.dt = 5e-3;
  c.t_end = 10 * c.dt;
  c.store_snapshots = false;
  for (auto _ : st) benchmark::DoNotOptimize(evolve(s0, c, s, DiffusionCoefficient::make_linear(0.1)).final_state.values.data());
}
BENCHMARK(BM_SolverSteps)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Factorization(benchmark::State& st) {
  const LatticeGrid g{1, 256, 32.0};
  const NoiseSampler s = build_sampler({Triangle1D{}, 1, 1.0}, g, 1);
  SolverConfig c;
  c.dt = 1e-3;
  c.t_end = static_cast<double>(st.range(0)) * c.dt;
  c.store_snapshots = false;
  c.keep_noise = true;
  const Trajectory tr = evolve(init_state(InitialDatum::constant_density(1.0), g, 1), c, s, DiffusionCoefficient::make_linear(1.0));
  const double t = static_cast<double>(tr.noise->forcing.size()) * c.dt;
  for (auto _ : st) {
    const YSeries y = compute_Y(*tr.noise, 0.25);
    benchmark::DoNotOptimize(factorization_reconstruct(y, t).data());
  }
}
BENCHMARK(BM_Factorization)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);
