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

// JSON and CSV formats.
//
// Game specs, solutions and estimates are JSON documents with a "type" tag.
// Tensors are flattened row-major with the last index fastest:
//   features     [s][a][b][k]
//   transitions  [s][a][b][s']
//   reward, q    [s][a][b]
// Count tables are written as CSV with a JSON metadata sidecar.

#ifndef QRINV_SERIALIZATION_H_
#define QRINV_SERIALIZATION_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qrinv/estimators.h"
#include "qrinv/experiments.h"
#include "qrinv/game_models.h"
#include "qrinv/qre_solver.h"
#include "qrinv/sampling.h"
#include "qrinv/system_builder.h"

namespace qrinv {

using Json = nlohmann::json;

// {"name": "qrinv", "version": ...}
Json ToolInfo();

Json ToJson(const Vector& v);
Vector VectorFromJson(const Json& j);
Json ToJson(const JointPolicy& policy);
JointPolicy PolicyFromJson(const Json& j);

Json ToJson(const FeatureMap& features);
FeatureMap FeatureMapFromJson(const Json& j);

Json ToJson(const MatrixGameSpec& spec);
MatrixGameSpec MatrixGameFromJson(const Json& j);

// The equilibrium block is written for reference; on load it is recomputed
// from Q* with the given solver settings.
Json ToJson(const MarkovGameSpec& spec);
MarkovGameSpec MarkovGameFromJson(const Json& j,
                                  const SolverConfig& solver = {.tol = 1e-12});

// "matrix-game" or "markov-game", from the "type" tag.
std::string GameType(const Json& j);

Json ToJson(const SolverConfig& config);
SolverConfig SolverConfigFromJson(const Json& j, SolverConfig base = {});

Json ToJson(const QreSolution& sol);
Json ToJson(const MarkovQreSolution& sol);

Json ToJson(const IdentifiabilityReport& report);
Json ToJson(const EstimationResult& result);
Json ToJson(const MarkovRecovery& recovery);

Json ToJson(const ConfidenceConfig& config);
ConfidenceConfig ConfidenceConfigFromJson(const Json& j,
                                          ConfidenceConfig base = {});

Json ToJson(const MatrixSample& sample);
MatrixSample MatrixSampleFromJson(const Json& j);

Json ToJson(const ExperimentConfig& config);
// Overlays the keys present in j onto base; unknown keys are rejected.
ExperimentConfig ExperimentConfigFromJson(const Json& j,
                                          ExperimentConfig base);

Json SummaryJson(const ExperimentResult& result);

// Markov dataset as <prefix>.pairs.csv (state,a,b,count),
// <prefix>.transitions.csv (state,a,b,next,count) and <prefix>.json.
void WriteMarkovDataset(const MarkovDataset& data, const std::string& prefix,
                        const Json& metadata);
MarkovDataset ReadMarkovDataset(const std::string& prefix);

// Matrix sample as <prefix>.csv (player,action,count) and <prefix>.json.
void WriteMatrixSample(const MatrixSample& sample, const std::string& prefix,
                       const Json& metadata);
MatrixSample ReadMatrixSample(const std::string& prefix);

// Columns: state,block,row,x0..x{d-1},y.
std::string SystemCsv(const LinearSystem& system);

// Columns: theta0..theta{d-1},tau,residual_sq,inside.
std::string ConfidenceScanCsv(const std::vector<ConfidenceScanPoint>& points,
                              const Json& metadata);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& contents);
Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& j);

// Shortest decimal text that round-trips the double.
std::string FormatDouble(double v);

}  // namespace qrinv

#endif  // QRINV_SERIALIZATION_H_
