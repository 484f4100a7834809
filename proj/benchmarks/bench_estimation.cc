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

#include "qrinv/estimators.h"
#include "qrinv/game_models.h"
#include "qrinv/qre_solver.h"
#include "qrinv/system_builder.h"

namespace qrinv {
namespace {

// Argument: actions per player.
void BM_BuildSystem(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MatrixGameSpec g = GenerateMatrixGame(k, k, 5, 2.0, 1.0, Seed{3});
  const QreSolution qre = SolveMatrixQre(g.Payoff(), g.tau_star);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildSystem(g.features, qre.policy));
  }
}
BENCHMARK(BM_BuildSystem)->Arg(10)->Arg(50);

void BM_NlsEstimate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const MatrixGameSpec g = GenerateMatrixGame(k, k, 5, 2.0, 1.0, Seed{4});
  const QreSolution qre = SolveMatrixQre(g.Payoff(), g.tau_star);
  const LinearSystem sys = BuildSystem(g.features, qre.policy);
  for (auto _ : state) {
    benchmark::DoNotOptimize(NlsEstimate(sys, g.norm_c));
  }
}
BENCHMARK(BM_NlsEstimate)->Arg(10)->Arg(50);

// Arguments: states, actions per player.
void BM_MarkovSystem(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const MarkovGameSpec g = GenerateMarkovGame(s, k, k, 6, 1.5, 1.0, 0.9, Seed{5});
  for (auto _ : state) {
    const LinearSystem sys =
        BuildMarkovSystem(g.features, g.equilibrium.policies);
    benchmark::DoNotOptimize(NlsEstimate(sys, g.norm_r));
  }
}
BENCHMARK(BM_MarkovSystem)->Args({8, 5})->Args({32, 5});

}  // namespace
}  // namespace qrinv
