// Microbenchmarks for the hot paths: loss-system primitives, certification,
// the two solvers, and the event-driven simulator.

#include <benchmark/benchmark.h>

#include "erloss/certify.hpp"
#include "erloss/dynamic.hpp"
#include "erloss/experiments.hpp"
#include "erloss/loss.hpp"
#include "erloss/sim.hpp"
#include "erloss/state_space.hpp"
#include "erloss/static_policy.hpp"

namespace {

void BM_erlang_b(benchmark::State& state) {
  const int C = static_cast<int>(state.range(0));
  const double rho = 0.7 * C;
  for (auto _ : state) benchmark::DoNotOptimize(erloss::erlang_b(C, rho));
}
BENCHMARK(BM_erlang_b)->Arg(5)->Arg(20)->Arg(47);

void BM_erlang_service_level(benchmark::State& state) {
  const int C = static_cast<int>(state.range(0));
  const double rho = 0.9 * C;
  for (auto _ : state) benchmark::DoNotOptimize(erloss::erlang_service_level(C, rho));
}
BENCHMARK(BM_erlang_service_level)->Arg(5)->Arg(20)->Arg(47);

void BM_birth_death_stationary(benchmark::State& state) {
  const int C = static_cast<int>(state.range(0));
  std::vector<double> lambdas(static_cast<std::size_t>(C));
  for (int i = 0; i < C; ++i) lambdas[static_cast<std::size_t>(i)] = 2.0 - 1.5 * i / C;
  for (auto _ : state) benchmark::DoNotOptimize(erloss::birth_death_stationary(lambdas, 1.0, C));
}
BENCHMARK(BM_birth_death_stationary)->Arg(5)->Arg(20);

void BM_ratio_at_point(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(erloss::ratio_at_point(19, 40.0, 4.0, 3.5));
}
BENCHMARK(BM_ratio_at_point);

void BM_certify_box(benchmark::State& state) {
  const int C = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(erloss::certify_box(C, N));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(N) * N * N);
}
BENCHMARK(BM_certify_box)->Args({3, 100})->Args({19, 100})->Args({19, 500})
    ->Unit(benchmark::kMillisecond);

void BM_solve_dynamic(benchmark::State& state) {
  const erloss::instance inst = erloss::example1_instance();
  const erloss::state_space S(inst.C, inst.num_classes());
  for (auto _ : state) benchmark::DoNotOptimize(erloss::solve_dynamic(inst, S));
  state.SetLabel("two classes, C=3");
}
BENCHMARK(BM_solve_dynamic)->Unit(benchmark::kMicrosecond);

void BM_optimal_static(benchmark::State& state) {
  const erloss::instance inst = erloss::example1_instance();
  for (auto _ : state) benchmark::DoNotOptimize(erloss::optimal_static(inst));
}
BENCHMARK(BM_optimal_static)->Unit(benchmark::kMicrosecond);

void BM_simulate(benchmark::State& state) {
  const erloss::instance inst = erloss::example1_instance();
  const erloss::state_space S(inst.C, inst.num_classes());
  const erloss::static_policy pol{{0.002, 0.11}};
  std::vector<erloss::service_spec> service;
  for (const auto& cl : inst.classes)
    service.push_back(erloss::service_spec::exponential(1.0 / cl.mu));
  const double horizon = static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(erloss::simulate(inst, S, pol, service, horizon, 2, 7));
}
BENCHMARK(BM_simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
