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

// Monte Carlo experiment drivers.
//
// Each trial draws its own game and samples from streams derived from
// (master seed, trial, purpose, grid index), so outputs are identical for
// any worker count. Trials run on a small thread pool; results are folded in
// trial order.

#ifndef QRINV_EXPERIMENTS_H_
#define QRINV_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrinv/game_models.h"
#include "qrinv/qre_solver.h"

namespace qrinv {

enum class ExperimentKind {
  kConvergenceMatrix,
  kComparisonTable,
  kMisspecifiedC,
  kConvergenceMarkov,
  kUnknownDynamics,
  kFeatureMisspecification,
  kCoverage,
};

const char* ExperimentName(ExperimentKind kind);
ExperimentKind ParseExperimentKind(const std::string& name);
std::vector<ExperimentKind> AllExperimentKinds();

struct ExperimentConfig {
  std::string name;
  int m = 10;
  int n = 10;
  int d = 5;
  int num_states = 8;
  double tau_star = 2.0;
  double norm = 1.0;  // C for matrix games, R for Markov games
  double gamma = 0.9;
  // Sample sizes: N for matrix games, K = S * N_per_state for Markov games.
  std::vector<std::int64_t> grid;
  int trials = 50;
  std::uint64_t seed = 20260101;
  std::optional<double> floor;  // default 1 / (2N)
  double alpha = 1.0;           // Laplace smoothing of transitions
  std::vector<double> c_ratios;
  std::vector<double> tau_assumed;
  int d_est = 4;
  bool fixed_game = false;
  int jobs = 0;  // 0 = hardware concurrency
  double delta = 0.05;
  std::optional<double> tau_max;  // default tau_star
  SolverConfig solver{.tol = 1e-12};

  void Validate() const;
};

ExperimentConfig DefaultExperimentConfig(ExperimentKind kind);

// n log-spaced integers from lo to hi inclusive.
std::vector<std::int64_t> LogGrid(std::int64_t lo, std::int64_t hi, int n);

struct TrialRecord {
  int trial = 0;
  std::string group;
  double x = 0.0;
  std::vector<double> values;  // aligned with ExperimentResult::metrics
  bool ok = true;
  bool floored = false;
  std::string error;
};

struct SeriesSummary {
  std::string group;
  std::string metric;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stddev;   // across-trial sample standard deviation
  std::vector<double> stderr_;  // stddev / sqrt(count)
  std::vector<int> count;
  std::optional<double> slope;  // log-log OLS on means, >= 4 points
};

struct ExperimentResult {
  std::string name;
  ExperimentConfig config;
  std::vector<std::string> metrics;
  std::vector<TrialRecord> raw;
  std::vector<SeriesSummary> series;
  int failures = 0;
  // False when x is not a sample size (the C-ratio sweep).
  bool fit_slopes = true;

  const SeriesSummary& Series(const std::string& group,
                              const std::string& metric) const;
};

using ConvergenceReport = ExperimentResult;

ConvergenceReport RunConvergenceMatrix(const ExperimentConfig& config);
ExperimentResult RunComparisonTable(const ExperimentConfig& config);
ExperimentResult RunMisspecifiedC(const ExperimentConfig& config);
ConvergenceReport RunConvergenceMarkov(const ExperimentConfig& config);
ConvergenceReport RunUnknownDynamics(const ExperimentConfig& config);
ExperimentResult RunFeatureMisspecification(const ExperimentConfig& config);
ExperimentResult RunCoverage(const ExperimentConfig& config);
ExperimentResult RunExperiment(ExperimentKind kind,
                               const ExperimentConfig& config);

struct ComparisonRow {
  std::string method;
  std::string tau;  // "estimated" or the assumed value
  double mean_error = 0.0;
  double stddev = 0.0;
  double stderr_ = 0.0;
};

// Table rows of a comparison-table result, NLS first.
std::vector<ComparisonRow> ComparisonTable(const ExperimentResult& result);

// OLS slope of log(error) on log(size).
double FitLogLogSlope(std::span<const double> sizes,
                      std::span<const double> errors);

// Recomputes the series from raw records (used to verify summaries).
std::vector<SeriesSummary> Summarize(const ExperimentResult& result);

// argmin_theta |Phi theta - vec(Q)|_2 for a single-state feature map.
Vector ProjectPayoffOntoFeatures(const FeatureMap& features, const Matrix& q);

// Writes <dir>/<name>/{raw.csv, summary.json, plotdata.csv}.
void WriteExperimentOutputs(const ExperimentResult& result,
                            const std::string& output_dir);

}  // namespace qrinv

#endif  // QRINV_EXPERIMENTS_H_
