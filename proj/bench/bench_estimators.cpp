// Serial reference vs OpenMP kernels for the diagnostics estimators.

#include <benchmark/benchmark.h>

#include "plgame/diagnostics.hpp"
#include "plgame/problems.hpp"

using namespace plgame;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::Serial : Execution::Parallel;
}

SampleSpec spec(const benchmark::State& state) {
  return {SampleMode::Random, static_cast<std::size_t>(state.range(0)), 1, std::nullopt, false};
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) == 0 ? "serial" : "parallel");
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PlConstant(benchmark::State& state) {
  const auto p = make_problem(BuiltinProblem::PlSin);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_pl_constant(p, Vector{0.5}, spec(state), mode(state)));
  }
  label(state);
}

void BM_QgConstant(benchmark::State& state) {
  const auto p = make_problem(BuiltinProblem::Quad2d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_qg_constant(p, Vector{0.5}, spec(state), mode(state)));
  }
  label(state);
}

void BM_Lipschitz(benchmark::State& state) {
  const auto p = make_problem(BuiltinProblem::PlSin);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_lipschitz(p, spec(state), mode(state)));
  }
  label(state);
}

void BM_Stability(benchmark::State& state) {
  const auto p = make_problem(BuiltinProblem::QuadDegenerate);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_stability(p, spec(state), mode(state)));
  }
  label(state);
}

void BM_Diagnostics(benchmark::State& state) {
  const auto p = make_problem(BuiltinProblem::PlSin);
  DiagnosticsConfig cfg;
  cfg.samples = static_cast<std::size_t>(state.range(0));
  cfg.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_diagnostics(p, cfg));
  label(state);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {10000L, 100000L, 1000000L}) {
    b->Args({n, 0});
    b->Args({n, 1});
  }
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_PlConstant)->Apply(sizes);
BENCHMARK(BM_QgConstant)->Apply(sizes);
BENCHMARK(BM_Lipschitz)->Apply(sizes);
BENCHMARK(BM_Stability)->Apply(sizes);
BENCHMARK(BM_Diagnostics)->Args({10000, 0})->Args({10000, 1})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
