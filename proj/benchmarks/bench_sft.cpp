#include <random>

#include <benchmark/benchmark.h>

#include "aubry/sft.hpp"

using namespace aubry;

static void BM_TopEntropy(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_essential_matrix(static_cast<int>(state.range(0)), 0.3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(top_entropy(a));
}
BENCHMARK(BM_TopEntropy)->Arg(4)->Arg(12)->Arg(64);

static void BM_ShortestCycle(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_essential_matrix(static_cast<int>(state.range(0)), 0.1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(shortest_cycle(a));
}
BENCHMARK(BM_ShortestCycle)->Arg(12)->Arg(64)->Arg(256);

static void BM_CountWords(benchmark::State& state) {
  const auto a = TransitionMatrix::golden_mean();
  for (auto _ : state) benchmark::DoNotOptimize(count_words(a, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CountWords)->Arg(40)->Arg(400);

static void BM_BlockRecode(benchmark::State& state) {
  const MatrixWordSource y(TransitionMatrix::full(3));
  for (auto _ : state) benchmark::DoNotOptimize(block_recode(y, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BlockRecode)->DenseRange(2, 6, 2);
