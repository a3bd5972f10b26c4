#include <benchmark/benchmark.h>

#include "esenc/dgps.hpp"

namespace {

using namespace esenc;

void BM_Simulate(benchmark::State& state, dgp::DgpFamily family) {
  dgp::DgpSpec spec;
  spec.family = family;
  spec.pi = 0.5;
  spec.n = static_cast<int>(state.range(0));
  spec.seed = 11;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dgp::simulate(spec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Simulate, garch, dgp::DgpFamily::GarchCombo)->Arg(4000);
BENCHMARK_CAPTURE(BM_Simulate, gas_t, dgp::DgpFamily::GasTCombo)
    ->Arg(4000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, vares_gas, dgp::DgpFamily::VarEsGasCombo)->Arg(4000);
BENCHMARK_CAPTURE(BM_Simulate, es_caviar, dgp::DgpFamily::EsCaviarCombo)->Arg(4000);

BENCHMARK_MAIN();
