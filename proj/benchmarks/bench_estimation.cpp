#include <benchmark/benchmark.h>

#include "esenc/dgps.hpp"
#include "esenc/encompassing.hpp"
#include "esenc/estimation.hpp"

namespace {

using namespace esenc;

ForecastSet garch_path(int n) {
  dgp::DgpSpec spec;
  spec.family = dgp::DgpFamily::GarchCombo;
  spec.pi = 0.0;
  spec.n = n;
  spec.seed = 7;
  return dgp::simulate(spec);
}

void BM_EstimateJoint(benchmark::State& state) {
  const ForecastSet fs = garch_path(static_cast<int>(state.range(0)));
  const auto link = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mestim::estimate(
        fs, link, link, mestim::EstimationMode::JointOrAux, {}));
  }
}

void BM_EstimateStrict(benchmark::State& state) {
  const ForecastSet fs = garch_path(static_cast<int>(state.range(0)));
  const auto link = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mestim::estimate(
        fs, link, link, mestim::EstimationMode::Strict, {}));
  }
}

void BM_RunSuiteStrictAux(benchmark::State& state) {
  const ForecastSet fs = garch_path(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc::run_suite(
        fs, {enc::TestVariant::StrictES, enc::TestVariant::AuxES}, {}));
  }
}

}  // namespace

BENCHMARK(BM_EstimateJoint)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateStrict)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunSuiteStrictAux)
    ->Arg(1000)
    ->Arg(4000)
    ->Unit(benchmark::kMillisecond);
