// Copyright 2026 The laughlin Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <map>

#include "laughlin/correlations.hpp"
#include "laughlin/expansion.hpp"

namespace {

using namespace laughlin;

const CoefficientTable& previous_table(int p, int N) {
  static std::map<std::pair<int, int>, CoefficientTable> cache;
  auto it = cache.find({p, N});
  if (it == cache.end()) it = cache.emplace(std::make_pair(p, N), expand(ModelParams(p, 1.0, N - 1))).first;
  return it->second;
}

const AmplitudeTable& amplitude_table(int p, int N) {
  static std::map<std::pair<int, int>, AmplitudeTable> cache;
  auto it = cache.find({p, N});
  if (it == cache.end()) it = cache.emplace(std::make_pair(p, N), amplitudes(expand(ModelParams(p, 1.0, N)), 1.0)).first;
  return it->second;
}

void BM_ExpandStepSerial(benchmark::State& state) {
  const auto& prev = previous_table(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(expand_step_serial(prev));
}

void BM_ExpandStepParallel(benchmark::State& state) {
  const auto& prev = previous_table(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(expand_step(prev));
}

void BM_OccupationSerial(benchmark::State& state) {
  const auto& t = amplitude_table(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(occupation_finite_serial(t));
}

void BM_OccupationParallel(benchmark::State& state) {
  const auto& t = amplitude_table(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(occupation_finite(t));
}

}  // namespace

BENCHMARK(BM_ExpandStepSerial)->Args({3, 7})->Args({3, 8})->Args({2, 9})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpandStepParallel)->Args({3, 7})->Args({3, 8})->Args({2, 9})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OccupationSerial)->Args({3, 8})->Args({2, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OccupationParallel)->Args({3, 8})->Args({2, 10})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
