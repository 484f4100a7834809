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

#include "qrinv/serialization.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "test_util.h"

namespace qrinv {
namespace {

using ::qrinv::testing::MaxAbs;
using ::qrinv::testing::TempDir;

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(100000), "100000");
  EXPECT_EQ(FormatDouble(std::nan("")), "nan");
  for (double v : {1.0 / 3, 2.718281828459045, -1e-300, 6.02e23}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

TEST(MatrixGameJsonTest, RoundTripIsExact) {
  const MatrixGameSpec g = GenerateMatrixGame(4, 3, 2, 1.5, 2.0, Seed{1});
  const Json j = Json::parse(ToJson(g).dump());
  EXPECT_EQ(GameType(j), "matrix-game");
  const MatrixGameSpec back = MatrixGameFromJson(j);
  EXPECT_EQ(back.features.values(), g.features.values());
  EXPECT_EQ(back.theta_star, g.theta_star);
  EXPECT_EQ(back.tau_star, 1.5);
  EXPECT_EQ(back.norm_c, 2.0);
  EXPECT_EQ(back.features.bound(), g.features.bound());
}

TEST(MarkovGameJsonTest, RoundTripRecomputesEquilibrium) {
  const MarkovGameSpec g = GenerateMarkovGame(3, 3, 2, 2, 1.0, 1.0, 0.8, Seed{2});
  const MarkovGameSpec back =
      MarkovGameFromJson(Json::parse(ToJson(g).dump()));
  EXPECT_EQ(back.transitions.values(), g.transitions.values());
  for (int s = 0; s < 3; ++s) {
    EXPECT_LT(MaxAbs(back.reward[s], g.reward[s]), 1e-14);
    EXPECT_EQ(back.equilibrium.policies[s].mu, g.equilibrium.policies[s].mu);
  }
}

TEST(GameJsonTest, ReportsOffendingField) {
  Json j = ToJson(GenerateMatrixGame(3, 3, 2, 1.0, 1.0, Seed{3}));
  j["tau_star"] = "hot";
  try {
    MatrixGameFromJson(j);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("tau_star"), std::string::npos);
  }
  j.erase("tau_star");
  EXPECT_THROW(MatrixGameFromJson(j), InvalidArgument);
  j["type"] = "chess";
  EXPECT_THROW(GameType(j), InvalidArgument);
}

TEST(ExperimentConfigJsonTest, OverlayAndRoundTrip) {
  const ExperimentConfig base =
      DefaultExperimentConfig(ExperimentKind::kConvergenceMatrix);
  const Json overlay = {{"trials", 7}, {"grid", {10, 20}}, {"floor", 0.01},
                        {"solver", {{"tol", 1e-10}}}};
  const ExperimentConfig c = ExperimentConfigFromJson(overlay, base);
  EXPECT_EQ(c.trials, 7);
  EXPECT_EQ(c.grid, (std::vector<std::int64_t>{10, 20}));
  EXPECT_EQ(c.floor, 0.01);
  EXPECT_EQ(c.solver.tol, 1e-10);
  EXPECT_EQ(c.m, base.m);
  const ExperimentConfig again = ExperimentConfigFromJson(ToJson(c), base);
  EXPECT_EQ(ToJson(again), ToJson(c));
}

TEST(ExperimentConfigJsonTest, RejectsUnknownAndMistypedFields) {
  const ExperimentConfig base =
      DefaultExperimentConfig(ExperimentKind::kConvergenceMatrix);
  try {
    ExperimentConfigFromJson({{"trails", 3}}, base);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("config.trails"), std::string::npos);
  }
  try {
    ExperimentConfigFromJson({{"grid", "big"}}, base);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("config.grid"), std::string::npos);
  }
  EXPECT_THROW(ExperimentConfigFromJson({{"solver", {{"speed", 1}}}}, base),
               InvalidArgument);
}

TEST(MatrixSampleIoTest, RoundTrip) {
  TempDir dir;
  const MatrixSample s{{3, 0, 7}, {4, 6}, 10};
  WriteMatrixSample(s, dir / "play", {{"seed", 5}});
  const MatrixSample back = ReadMatrixSample(dir / "play");
  EXPECT_EQ(back.counts_a, s.counts_a);
  EXPECT_EQ(back.counts_b, s.counts_b);
  EXPECT_EQ(back.total, 10);
  EXPECT_EQ(ReadJsonFile(dir / "play.json")["seed"], 5);
}

TEST(MarkovDatasetIoTest, RoundTrip) {
  TempDir dir;
  const MarkovGameSpec g = GenerateMarkovGame(3, 2, 2, 2, 1.0, 1.0, 0.5, Seed{4});
  const MarkovDataset d =
      SampleMarkovDataset(g, g.equilibrium.policies, 50, Seed{5});
  WriteMarkovDataset(d, dir / "data", Json::object());
  const MarkovDataset back = ReadMarkovDataset(dir / "data");
  EXPECT_EQ(back.pair_counts(), d.pair_counts());
  EXPECT_EQ(back.transition_counts(), d.transition_counts());
  EXPECT_EQ(back.per_state(), 50);
}

TEST(SystemCsvTest, OneRowPerConstraint) {
  const MatrixGameSpec g = GenerateMatrixGame(3, 4, 2, 1.0, 1.0, Seed{6});
  const LinearSystem sys = BuildSystem(g.features, JointPolicy::Uniform(3, 4));
  const std::string csv = SystemCsv(sys);
  EXPECT_EQ(csv.rfind("state,block,row,x0,x1,y\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 5);
  EXPECT_NE(csv.find("0,nu,4,"), std::string::npos);
}

TEST(SolutionJsonTest, NonFiniteValuesBecomeNull) {
  QreSolution sol;
  sol.policy = JointPolicy::Uniform(2, 2);
  sol.payoff = Matrix::Zero(2, 2);
  sol.residual = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(ToJson(sol)["residual"].is_null());
}

TEST(FileIoTest, ErrorsAreCategorized) {
  EXPECT_THROW(ReadTextFile("/nonexistent/qrinv/file"), IoError);
  EXPECT_THROW(WriteTextFile("/nonexistent/qrinv/file", "x"), IoError);
  TempDir dir;
  WriteTextFile(dir / "bad.json", "{ not json");
  EXPECT_THROW(ReadJsonFile(dir / "bad.json"), InvalidArgument);
}

}  // namespace
}  // namespace qrinv
