#include <benchmark/benchmark.h>

#include "pretime/bounds.hpp"
#include "pretime/dynamics.hpp"
#include "pretime/quadrature.hpp"

namespace {

using namespace pretime;

const SystemParams kFig = SystemParams::validate(4.0, 0.25, 0.5, 3.0, 1.5);

void BM_GammaBound(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gamma_bound(kFig));
}
BENCHMARK(BM_GammaBound);

void BM_IntegrateFull(benchmark::State& state) {
  const double tol = state.range(0) == 0 ? kSettlingTolerance : kOracleTolerance;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_full(kFig, tol).value);
}
BENCHMARK(BM_IntegrateFull)->Arg(0)->Arg(1);

void BM_SettlingTime(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(settling_time(kFig, 1.0).value);
}
BENCHMARK(BM_SettlingTime);

void BM_SimulatePredefined(benchmark::State& state) {
  const auto pp = PredefinedParams::make(kFig, 1.0);
  const double x0 = state.range(0) == 0 ? 1.0 : 1e20;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(PredefinedSystem{pp}, {x0, 0.0}, 1.2).settled_at);
}
BENCHMARK(BM_SimulatePredefined)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SimulateSecondOrder(benchmark::State& state) {
  const SecondOrderSystem sys{SecondOrderParams::make(4.0, 0.25, kFig, 0.5, 0.5, 1.0, 1.0),
                              Disturbance::sinusoid(1.0, 5.0, 1.0)};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(sys, {100.0, 100.0}, 1.2).settled_at);
}
BENCHMARK(BM_SimulateSecondOrder)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
