#include <benchmark/benchmark.h>

#include "shelab/heatinit.hpp"
#include "shelab/kernels.hpp"

using namespace shelab;

static void BM_UpsilonQuadrature(benchmark::State& st) {
  const SpectralModel m{BesselCorrelation{static_cast<double>(st.range(0))}, 3, 1.0};
  for (auto _ : st) benchmark::DoNotOptimize(upsilon(m, 0.2, 0.0));
}
BENCHMARK(BM_UpsilonQuadrature)->Arg(2)->Arg(4);

static void BM_HAlpha(benchmark::State& st) {
  const SpectralModel m{BesselCorrelation{4.0}, 3, 1.0};
  for (auto _ : st) benchmark::DoNotOptimize(h_alpha(m, 0.25, 1e-3));
}
BENCHMARK(BM_HAlpha);

static void BM_GRhoRiesz(benchmark::State& st) {
  const Weight w{WeightKind::exp_decay, 1.0, 3};
  for (auto _ : st) benchmark::DoNotOptimize(g_rho(1.0, InitialDatum::riesz_singular(1.0), w));
}
BENCHMARK(BM_GRhoRiesz);
