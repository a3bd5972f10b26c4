#include <benchmark/benchmark.h>

#include "esenc/dgps.hpp"
#include "esenc/estimation.hpp"

namespace {

using namespace esenc;

ForecastSet garch_path(int n) {
  dgp::DgpSpec spec;
  spec.family = dgp::DgpFamily::GarchCombo;
  spec.pi = 0.5;
  spec.n = n;
  spec.seed = 99;
  return dgp::simulate(spec);
}

void BM_FZ0Objective(benchmark::State& state) {
  const ForecastSet fs = garch_path(static_cast<int>(state.range(0)));
  const auto link = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  mestim::CombinationProblem problem(fs, link, link,
                                     mestim::EstimationMode::JointOrAux);
  Eigen::VectorXd theta(6);
  theta << 0.01, 0.9, 0.1, 0.01, 0.9, 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(problem.objective(theta));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TickObjective(benchmark::State& state) {
  const ForecastSet fs = garch_path(static_cast<int>(state.range(0)));
  const auto link = links::LinkSpec::of(links::LinkKind::LinearIntercept);
  mestim::QuantileProblem problem(fs, link);
  Eigen::VectorXd beta(3);
  beta << 0.01, 0.9, 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(problem.objective(beta));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FZ0Objective)->Arg(1000)->Arg(4000);
BENCHMARK(BM_TickObjective)->Arg(1000)->Arg(4000);
