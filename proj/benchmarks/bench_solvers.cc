// Copyright 2026 The qrinv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "qrinv/game_models.h"
#include "qrinv/qre_solver.h"

namespace qrinv {
namespace {

// Arguments: actions per player, temperature in tenths.
void BM_SolveMatrixQre(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const double tau = state.range(1) / 10.0;
  const MatrixGameSpec g = GenerateMatrixGame(k, k, 5, tau, 1.0, Seed{1});
  const Matrix q = g.Payoff();
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveMatrixQre(q, tau, {.tol = 1e-12}));
  }
}
BENCHMARK(BM_SolveMatrixQre)
    ->Args({10, 20})
    ->Args({10, 5})
    ->Args({50, 20})
    ->Args({50, 1});

// Arguments: states, actions per player.
void BM_ForwardSolveMarkov(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const MarkovGameSpec g = GenerateMarkovGame(s, k, k, 6, 1.5, 1.0, 0.9, Seed{2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardSolveMarkov(g.reward, g.transitions,
                                                g.gamma, g.tau_star,
                                                {.tol = 1e-10}));
  }
}
BENCHMARK(BM_ForwardSolveMarkov)->Args({8, 5})->Args({32, 5})->Unit(
    benchmark::kMillisecond);

}  // namespace
}  // namespace qrinv

BENCHMARK_MAIN();
