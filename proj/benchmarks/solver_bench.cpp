// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "blobq/analytic/model.hpp"
#include "blobq/analytic/solver.hpp"

namespace {

using namespace blobq::analytic;

void BM_SolveDelay(benchmark::State& state) {
    const int B = static_cast<int>(state.range(0));
    const double rho = static_cast<double>(state.range(1)) / 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_delay(rho * B / 12.0, 12.0, B).T);
    }
}
BENCHMARK(BM_SolveDelay)->ArgsProduct({{1, 6, 16}, {50, 90, 95}})->Unit(benchmark::kMillisecond);

void BM_Stationary(benchmark::State& state) {
    const int n_max = static_cast<int>(state.range(0));
    const auto P = build_transition_matrix(epoch_arrival_pmf(0.4, 12.0), 6, n_max);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stationary_departure_distribution(P).probs.data());
    }
    state.SetComplexityN(n_max);
}
BENCHMARK(BM_Stationary)->RangeMultiplier(2)->Range(128, 2048)->Complexity()->Unit(benchmark::kMillisecond);

void BM_SweepLoadGrid(benchmark::State& state) {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    for (auto _ : state) benchmark::DoNotOptimize(sweep_load(6, 12.0, grid).size());
}
BENCHMARK(BM_SweepLoadGrid)->Unit(benchmark::kMillisecond);

}  // namespace
