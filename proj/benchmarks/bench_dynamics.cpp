#include <random>

#include <benchmark/benchmark.h>

#include "aubry/action.hpp"
#include "aubry/entropy.hpp"
#include "aubry/hyperbolic.hpp"
#include "aubry/lagrangian.hpp"

using namespace aubry;

static void BM_ElFlow(benchmark::State& state) {
  const auto L = cosine_lagrangian({0.0, 1.0});
  const auto method = static_cast<Integrator>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(el_flow(L, {make_point(0.5), make_point(2.0)}, 10.0, 1e-3, method));
}
BENCHMARK(BM_ElFlow)
    ->Arg(static_cast<int>(Integrator::Verlet))
    ->Arg(static_cast<int>(Integrator::Yoshida4))
    ->Arg(static_cast<int>(Integrator::RungeKutta4));

static void BM_CriticalValue(benchmark::State& state) {
  const auto L = cosine_lagrangian({0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(critical_value(L));
}
BENCHMARK(BM_CriticalValue)->Unit(benchmark::kMillisecond);

static void BM_Shadow(benchmark::State& state) {
  const ToralAutomorphism tm;
  std::mt19937_64 rng(3);
  const auto p = random_pseudo_orbit(tm, static_cast<std::size_t>(state.range(0)), 1e-4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(shadow(tm, p));
}
BENCHMARK(BM_Shadow)->Arg(1000)->Arg(10000);

static void BM_EstimateEntropy(benchmark::State& state) {
  const ToralAutomorphism tm;
  const auto F = unstable_segment_ensemble(tm, make_point(0.3, 0.2), static_cast<std::size_t>(state.range(0)),
                                           segment_spacing(tm, 10.0, 0.05), 0, 10);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_entropy(F, 10.0, 0.05));
}
BENCHMARK(BM_EstimateEntropy)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
