#include <benchmark/benchmark.h>

#include "mtcoal/ancestry.hpp"
#include "mtcoal/laws.hpp"
#include "mtcoal/limits.hpp"
#include "mtcoal/partition.hpp"

using namespace mtcoal;

static void BM_enumerate_partitions(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_partitions(n, 3));
  }
}
BENCHMARK(BM_enumerate_partitions)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_transition_matrix(benchmark::State& state) {
  auto model = wf_desk_model();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(transition_matrix(model, n));
  }
}
BENCHMARK(BM_transition_matrix)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_check_consistency(benchmark::State& state) {
  auto model = wf_desk_model();
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_consistency(model, depth));
  }
}
BENCHMARK(BM_check_consistency)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_xi_rate_completion(benchmark::State& state) {
  XiSpec spec;
  spec.a = {0.0, 0.0};
  spec.atoms.push_back({1.0, {0.5, 0.25}, {0, 1}});
  const int depth = static_cast<int>(state.range(0));
  auto partial = xi_rate_table(spec, depth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(complete_rates_by_consistency(partial, depth));
  }
}
BENCHMARK(BM_xi_rate_completion)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_one_step_simulation(benchmark::State& state) {
  auto model = wf_desk_model();
  auto initial = LabeledPartition::singletons(2, 2, {0, 0});
  SplitMix64 rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_ancestry(model, initial, 1, rng));
  }
}
BENCHMARK(BM_one_step_simulation);

BENCHMARK_MAIN();
