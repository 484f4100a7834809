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

#include "qrinv/estimators.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "frozen_values.h"
#include "qrinv/game_models.h"
#include "qrinv/qre_solver.h"
#include "qrinv/sampling.h"
#include "qrinv/system_builder.h"
#include "test_util.h"

namespace qrinv {
namespace {

using ::qrinv::testing::MaxAbs;

LinearSystem ExactSystem(const MatrixGameSpec& g) {
  const QreSolution sol =
      SolveMatrixQre(g.Payoff(), g.tau_star, SolverConfig{.tol = 1e-13});
  return BuildSystem(g.features, sol.policy);
}

LinearSystem NoisySystem(const MatrixGameSpec& g, std::int64_t n,
                         std::uint64_t seed) {
  const QreSolution sol = SolveMatrixQre(g.Payoff(), g.tau_star);
  const MatrixSample s = SampleMatrixPlay(sol.policy, n, Seed{seed});
  return BuildSystem(g.features, EmpiricalPolicies(s).policy);
}

TEST(MinimumNormLeastSquaresTest, MatchesHighPrecisionOracle) {
  Matrix x(4, 2);
  x << 1, 2, 3, 4, 5, 7, -1, 0.5;
  Vector y(4);
  y << 1, -1, 2, 0.25;
  const Vector theta = MinimumNormLeastSquares(x, y);
  EXPECT_NEAR(theta[0], frozen::kLsTheta[0], 1e-14);
  EXPECT_NEAR(theta[1], frozen::kLsTheta[1], 1e-14);
}

TEST(MinimumNormLeastSquaresTest, RankDeficientGivesMinimumNorm) {
  // Two identical columns: every split of the coefficient fits equally well;
  // the minimum-norm solution splits it evenly.
  Matrix x(3, 2);
  x << 1, 1, 2, 2, 3, 3;
  Vector y(3);
  y << 2, 4, 6;
  const Vector theta = MinimumNormLeastSquares(x, y);
  EXPECT_NEAR(theta[0], 1.0, 1e-12);
  EXPECT_NEAR(theta[1], 1.0, 1e-12);
  const Vector cod = x.completeOrthogonalDecomposition().solve(y);
  EXPECT_LT(MaxAbs(theta, cod), 1e-12);
}

TEST(NlsEstimateTest, RecoversExactSystem) {
  for (double tau : {0.5, 2.0, 5.0}) {
    const MatrixGameSpec g = GenerateMatrixGame(10, 10, 5, tau, 1.0, Seed{1});
    const EstimationResult est = NlsEstimate(ExactSystem(g), 1.0);
    EXPECT_LT((est.theta_hat - g.theta_star).norm(), 1e-8);
    EXPECT_LT(std::abs(est.tau_hat - tau), 1e-8);
    EXPECT_TRUE(est.identifiability.identifiable);
  }
}

TEST(NlsEstimateTest, ZeroLogRatiosRaiseNonUniformity) {
  const MatrixGameSpec g = GenerateMatrixGame(4, 4, 2, 1.0, 1.0, Seed{2});
  const LinearSystem sys = BuildSystem(g.features, JointPolicy::Uniform(4, 4));
  EXPECT_THROW(NlsEstimate(sys, 1.0), NonUniformityViolation);
  EXPECT_THROW(StandardIgtEstimate(sys, 1.0), NonUniformityViolation);
}

TEST(NlsEstimateTest, OutputInvariants) {
  const MatrixGameSpec g = GenerateMatrixGame(10, 10, 5, 2.0, 1.0, Seed{3});
  const LinearSystem sys = NoisySystem(g, 5000, 4);
  for (double c : {0.5, 1.0, 7.0}) {
    const EstimationResult est = NlsEstimate(sys, c);
    EXPECT_NEAR(est.theta_hat.norm(), c, 1e-10 * c);
    EXPECT_LT(MaxAbs(est.theta_hat, est.tau_hat * est.theta_ls),
              1e-12 * est.theta_hat.norm());
    EXPECT_GT(est.tau_hat, 0.0);
    EXPECT_NEAR(est.residual,
                (sys.x * est.theta_hat - est.tau_hat * sys.y).norm(), 1e-12);
  }
}

TEST(NlsEstimateTest, LeastSquaresResidualIsOrthogonal) {
  const MatrixGameSpec g = GenerateMatrixGame(10, 10, 5, 2.0, 1.0, Seed{5});
  const LinearSystem sys = NoisySystem(g, 2000, 6);
  const EstimationResult est = NlsEstimate(sys, 1.0);
  const Vector normal = sys.x.transpose() * (sys.x * est.theta_ls - sys.y);
  EXPECT_LT(normal.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(NlsEstimateTest, RankDeficientSystemIsFlaggedButReturned) {
  const MatrixGameSpec g = GenerateMatrixGame(5, 5, 2, 1.0, 1.0, Seed{7});
  const LinearSystem sys = ExactSystem(g);
  LinearSystem dup = sys;
  dup.x.conservativeResize(Eigen::NoChange, 3);
  dup.x.col(2) = dup.x.col(1);
  const EstimationResult est = NlsEstimate(dup, 1.0);
  EXPECT_FALSE(est.identifiability.identifiable);
  EXPECT_EQ(est.identifiability.rank, 2);
  EXPECT_NEAR(est.theta_hat.norm(), 1.0, 1e-10);
}

TEST(NlsEstimateTest, RejectsNonPositiveNorm) {
  const MatrixGameSpec g = GenerateMatrixGame(4, 4, 2, 1.0, 1.0, Seed{2});
  EXPECT_THROW(NlsEstimate(ExactSystem(g), 0.0), InvalidArgument);
}

TEST(NlsEstimateTest, NormalizationBreaksScaleAmbiguity) {
  // (k theta*, k tau*) induces the same equilibrium, hence the same system.
  const MatrixGameSpec g = GenerateMatrixGame(8, 8, 4, 1.5, 1.0, Seed{8});
  for (double k : {0.2, 4.0}) {
    const QreSolution sol = SolveMatrixQre(k * g.Payoff(), k * 1.5,
                                           SolverConfig{.tol = 1e-13});
    const LinearSystem sys = BuildSystem(g.features, sol.policy);
    const EstimationResult scaled = NlsEstimate(sys, k);
    EXPECT_LT((scaled.theta_hat - k * g.theta_star).norm(), 1e-8 * k);
    EXPECT_NEAR(scaled.tau_hat, k * 1.5, 1e-8 * k);
    const EstimationResult fixed = NlsEstimate(sys, 1.0);
    EXPECT_LT((fixed.theta_hat - g.theta_star).norm(), 1e-8);
    EXPECT_NEAR(fixed.tau_hat, 1.5, 1e-8);
  }
}

TEST(NlsEstimateTest, MisspecifiedNormScalesTemperatureOnly) {
  const MatrixGameSpec g = GenerateMatrixGame(10, 10, 5, 2.0, 1.0, Seed{9});
  const LinearSystem sys = NoisySystem(g, 3000, 10);
  const EstimationResult base = NlsEstimate(sys, 1.0);
  for (double ratio : {0.1, 3.0, 10.0}) {
    const EstimationResult est = NlsEstimate(sys, ratio);
    EXPECT_NEAR(est.tau_hat, ratio * base.tau_hat, 1e-12 * ratio);
    EXPECT_LT(MaxAbs(est.theta_hat / est.theta_hat.norm(),
                     base.theta_hat / base.theta_hat.norm()),
              1e-14);
  }
}

TEST(StandardIgtEstimateTest, OracleAndScaledTemperatures) {
  const MatrixGameSpec g = GenerateMatrixGame(10, 10, 5, 2.0, 1.0, Seed{11});
  const LinearSystem sys = ExactSystem(g);
  EXPECT_LT((StandardIgtEstimate(sys, 2.0) - g.theta_star).norm(), 1e-8);
  for (double k : {0.5, 2.0}) {
    EXPECT_LT((StandardIgtEstimate(sys, k * 2.0) - k * g.theta_star).norm(),
              1e-8 * k);
  }
  EXPECT_THROW(StandardIgtEstimate(sys, 0.0), InvalidArgument);
}

class MarkovRecoveryTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    game_ = new MarkovGameSpec(
        GenerateMarkovGame(8, 5, 5, 6, 1.5, 1.0, 0.9, Seed{404}));
  }
  static void TearDownTestSuite() { delete game_; }
  static MarkovGameSpec* game_;
};
MarkovGameSpec* MarkovRecoveryTest::game_ = nullptr;

TEST_F(MarkovRecoveryTest, NoiselessRoundTrip) {
  const auto& pol = game_->equilibrium.policies;
  const MarkovRecovery rec = RecoverMarkovRewards(
      BuildMarkovSystem(game_->features, pol), 1.0, game_->features, pol,
      game_->transitions, 0.9);
  double worst = 0.0;
  for (int s = 0; s < 8; ++s) {
    worst = std::max(worst, MaxAbs(rec.r_hat[s], game_->reward[s]));
  }
  EXPECT_LT(worst, 1e-7);
  EXPECT_EQ(rec.dynamics_mode, DynamicsMode::kKnownP);
}

TEST_F(MarkovRecoveryTest, OutputInvariants) {
  const MarkovDataset data =
      SampleMarkovDataset(*game_, game_->equilibrium.policies, 500, Seed{1});
  std::vector<JointPolicy> pol;
  for (auto& e : EmpiricalStatePolicies(data)) pol.push_back(e.policy);
  const TransitionTensor p_hat = EstimateTransitions(data);
  const MarkovRecovery rec = RecoverMarkovRewards(
      BuildMarkovSystem(game_->features, pol), 1.0, game_->features, pol,
      p_hat, 0.9, DynamicsMode::kEstimatedP);
  const StateTables q = BuildQTables(game_->features, rec.theta_hat());
  for (int s = 0; s < 8; ++s) {
    EXPECT_EQ(MaxAbs(rec.q_hat[s], q[s]), 0.0);
    EXPECT_NEAR(rec.v_hat[s], RegularizedValue(q[s], pol[s], rec.tau_hat()),
                1e-12);
    const Matrix r = q[s] - 0.9 * p_hat.Expectation(s, rec.v_hat);
    EXPECT_LT(MaxAbs(rec.r_hat[s], r), 1e-12);
  }
}

TEST_F(MarkovRecoveryTest, ZeroDiscountRewardEqualsQ) {
  const auto& pol = game_->equilibrium.policies;
  const MarkovRecovery rec = RecoverMarkovRewards(
      BuildMarkovSystem(game_->features, pol), 1.0, game_->features, pol,
      game_->transitions, 0.0);
  for (int s = 0; s < 8; ++s) EXPECT_EQ(MaxAbs(rec.r_hat[s], rec.q_hat[s]), 0.0);
}

TEST_F(MarkovRecoveryTest, ModesCoincideWhenEstimateEqualsTruth) {
  const auto& pol = game_->equilibrium.policies;
  const EstimationResult est =
      NlsEstimate(BuildMarkovSystem(game_->features, pol), 1.0);
  const MarkovRecovery known = RecoverMarkovRewards(
      est, game_->features, pol, game_->transitions, 0.9, DynamicsMode::kKnownP);
  const MarkovRecovery estimated =
      RecoverMarkovRewards(est, game_->features, pol, game_->transitions, 0.9,
                           DynamicsMode::kEstimatedP);
  for (int s = 0; s < 8; ++s) EXPECT_EQ(known.r_hat[s], estimated.r_hat[s]);
}

TEST(DynamicsModeTest, RoundTripsNames) {
  for (DynamicsMode m : {DynamicsMode::kKnownP, DynamicsMode::kEstimatedP}) {
    EXPECT_EQ(ParseDynamicsMode(ToString(m)), m);
  }
  EXPECT_STREQ(ToString(DynamicsMode::kEstimatedP), "estimated-p");
  EXPECT_THROW(ParseDynamicsMode("guess"), InvalidArgument);
}

ConfidenceConfig ExampleConfig() {
  ConfidenceConfig c;
  c.delta = 0.05;
  c.xi = 0.01;
  c.feature_bound = 1.0;
  c.norm_c = 1.0;
  c.tau_max = 5.0;
  c.m = c.n = 10;
  c.samples = 10000;
  return c;
}

TEST(ConfidenceThresholdTest, MatchesClosedFormOracle) {
  const double kappa = ConfidenceThreshold(ExampleConfig());
  EXPECT_NEAR(kappa, frozen::kKappaExample[0], 1e-10 * kappa);
}

TEST(ConfidenceThresholdTest, ConstantsMatchDefinitions) {
  const ConfidenceConstants c = ComputeConfidenceConstants(ExampleConfig());
  EXPECT_DOUBLE_EQ(c.c_x, 2.0 * std::sqrt(20.0));
  EXPECT_DOUBLE_EQ(c.c_y, std::sqrt(160.0) / 0.01);
  EXPECT_DOUBLE_EQ(c.eps_n, c.eps_mu + c.eps_nu);
  EXPECT_NEAR(c.eps_mu, std::sqrt(2 * std::log(2 * 1024 / 0.05) / 1e4), 1e-15);
}

TEST(ConfidenceThresholdTest, DoublingSamplesHalvesThreshold) {
  ConfidenceConfig c = ExampleConfig();
  const double k1 = ConfidenceThreshold(c);
  c.samples *= 2;
  EXPECT_NEAR(ConfidenceThreshold(c), k1 / 2, 1e-12 * k1);
}

TEST(ConfidenceThresholdTest, MonotoneInTauMaxAndXi) {
  ConfidenceConfig c = ExampleConfig();
  const double base = ConfidenceThreshold(c);
  c.tau_max = 6.0;
  EXPECT_GT(ConfidenceThreshold(c), base);
  c = ExampleConfig();
  c.xi = 0.02;
  EXPECT_LT(ConfidenceThreshold(c), base);
}

TEST(ConfidenceThresholdTest, RejectsInvalidConfig) {
  ConfidenceConfig c = ExampleConfig();
  c.delta = 1.0;
  EXPECT_THROW(ConfidenceThreshold(c), InvalidArgument);
  c = ExampleConfig();
  c.xi = 0.0;
  EXPECT_THROW(ConfidenceThreshold(c), InvalidArgument);
  c = ExampleConfig();
  c.samples = 0;
  EXPECT_THROW(ConfidenceThreshold(c), InvalidArgument);
}

TEST(ConfidenceContainsTest, TruthIsInsideExactSystem) {
  const MatrixGameSpec g = GenerateMatrixGame(6, 6, 3, 1.0, 2.0, Seed{12});
  const LinearSystem sys = ExactSystem(g);
  EXPECT_TRUE(ConfidenceContains(sys, g.theta_star, 1.0, 1e-12, 2.0));
}

TEST(ConfidenceContainsTest, OffSphereIsOutside) {
  const MatrixGameSpec g = GenerateMatrixGame(6, 6, 3, 1.0, 2.0, Seed{12});
  const LinearSystem sys = ExactSystem(g);
  EXPECT_FALSE(ConfidenceContains(sys, 1.01 * g.theta_star, 1.01, 1e9, 2.0));
  EXPECT_THROW(ConfidenceContains(sys, g.theta_star, 0.0, 1.0, 2.0),
               InvalidArgument);
}

TEST(PlugInSoftMinGapTest, MinimumOverAllPolicies) {
  JointPolicy a = JointPolicy::Uniform(2, 3);
  JointPolicy b = JointPolicy::Uniform(2, 2);
  b.mu << 0.05, 0.95;
  const JointPolicy both[] = {a, b};
  EXPECT_DOUBLE_EQ(PlugInSoftMinGap(both), 0.05);
}

TEST(ScanConfidenceSetTest, PointsLieOnSphereAndStartAtEstimate) {
  const MatrixGameSpec g = GenerateMatrixGame(6, 6, 3, 1.0, 1.0, Seed{13});
  const LinearSystem sys = NoisySystem(g, 5000, 14);
  const std::vector<double> taus = {0.5, 1.0, 2.0};
  Rng rng(5);
  const auto pts = ScanConfidenceSet(sys, 1.0, 0.5, 10, taus, rng);
  ASSERT_EQ(pts.size(), 30u);
  const EstimationResult est = NlsEstimate(sys, 1.0);
  EXPECT_LT(MaxAbs(pts[0].theta, est.theta_hat), 1e-12);
  for (const auto& p : pts) {
    EXPECT_NEAR(p.theta.norm(), 1.0, 1e-12);
    const double r = BilinearResidual(sys, p.theta, p.tau);
    EXPECT_NEAR(p.residual_sq, r * r, 1e-12);
    EXPECT_EQ(p.inside, p.residual_sq <= 0.5);
  }
}

}  // namespace
}  // namespace qrinv
