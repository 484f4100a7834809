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

#include "qrinv/qre_solver.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "frozen_values.h"
#include "qrinv/game_models.h"
#include "test_util.h"

namespace qrinv {
namespace {

using ::qrinv::testing::MaxAbs;

Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix MatchingPennies() {
  Matrix q(2, 2);
  q << 1, -1, -1, 1;
  return q;
}

Matrix Game23() {
  Matrix q(2, 3);
  q << 1, 2, 0, 0, -1, 3;
  return q;
}

double CertificateResidual(const Matrix& q, const JointPolicy& p, double tau) {
  const JointPolicy br = LogitResponse(q, p, tau);
  return std::max(MaxAbs(br.mu, p.mu), MaxAbs(br.nu, p.nu));
}

TEST(EntropyTest, UniformIsLogM) {
  EXPECT_NEAR(Entropy(Vector::Constant(4, 0.25)), 1.386294361119890, 1e-15);
}

TEST(EntropyTest, PointMassIsZero) {
  EXPECT_EQ(Entropy(Vec({0.0, 1.0, 0.0})), 0.0);
}

TEST(EntropyTest, TwoPointMatchesOracle) {
  EXPECT_NEAR(Entropy(Vec({0.3, 0.7})), frozen::kEntropy37[0], 1e-15);
}

TEST(EntropyTest, RejectsNegativeEntries) {
  EXPECT_THROW(Entropy(Vec({-0.1, 1.1})), InvalidArgument);
}

TEST(RegularizedValueTest, ZeroPayoffUniformPlayIsZero) {
  EXPECT_NEAR(RegularizedValue(Matrix::Zero(5, 5), JointPolicy::Uniform(5, 5),
                               3.0),
              0.0, 1e-15);
}

TEST(RegularizedValueTest, ZeroTemperatureIsBilinearPayoff) {
  const Matrix q = Game23();
  const JointPolicy p{Vec({0.25, 0.75}), Vec({0.2, 0.3, 0.5})};
  EXPECT_NEAR(RegularizedValue(q, p, 0.0), p.mu.dot(q * p.nu), 1e-15);
}

TEST(RegularizedValueTest, MatchesTripleLoopOracle) {
  const MatrixGameSpec g = GenerateMatrixGame(3, 3, 2, 1.0, 1.0, Seed{12});
  const Matrix q = g.Payoff();
  const JointPolicy p{Vec({0.2, 0.5, 0.3}), Vec({0.6, 0.1, 0.3})};
  const double tau = 0.8;
  double bilinear = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) bilinear += p.mu[a] * q(a, b) * p.nu[b];
  }
  double h_mu = 0.0, h_nu = 0.0;
  for (int i = 0; i < 3; ++i) {
    h_mu -= p.mu[i] * std::log(p.mu[i]);
    h_nu -= p.nu[i] * std::log(p.nu[i]);
  }
  EXPECT_NEAR(RegularizedValue(q, p, tau), bilinear + tau * h_mu - tau * h_nu,
              1e-14);
}

TEST(RegularizedValueTest, RejectsDimensionMismatch) {
  EXPECT_THROW(RegularizedValue(Matrix::Zero(2, 3), JointPolicy::Uniform(3, 2),
                                1.0),
               InvalidArgument);
}

TEST(LogitResponseTest, ZeroPayoffGivesUniform) {
  const JointPolicy in{Vec({0.9, 0.1}), Vec({0.2, 0.2, 0.6})};
  const JointPolicy out = LogitResponse(Matrix::Zero(2, 3), in, 0.3);
  EXPECT_LT(MaxAbs(out.mu, Vector::Constant(2, 0.5)), 1e-15);
  EXPECT_LT(MaxAbs(out.nu, Vector::Constant(3, 1.0 / 3)), 1e-15);
}

TEST(LogitResponseTest, HugeTemperatureIsNearlyUniform) {
  const MatrixGameSpec g = GenerateMatrixGame(6, 4, 3, 1.0, 10.0, Seed{3});
  const JointPolicy out =
      LogitResponse(g.Payoff(), JointPolicy::Uniform(6, 4), 1e9);
  EXPECT_LT(MaxAbs(out.mu, Vector::Constant(6, 1.0 / 6)), 1e-6);
  EXPECT_LT(MaxAbs(out.nu, Vector::Constant(4, 0.25)), 1e-6);
}

TEST(LogitResponseTest, MatchingPenniesUniformIsFixed) {
  const JointPolicy out =
      LogitResponse(MatchingPennies(), JointPolicy::Uniform(2, 2), 1.0);
  EXPECT_LT(MaxAbs(out.mu, Vector::Constant(2, 0.5)), 1e-15);
  EXPECT_LT(MaxAbs(out.nu, Vector::Constant(2, 0.5)), 1e-15);
}

TEST(LogitResponseTest, DirectEvaluationOfResponses) {
  const Matrix q = Game23();
  const JointPolicy in{Vec({0.4, 0.6}), Vec({0.5, 0.25, 0.25})};
  const double tau = 0.7;
  const JointPolicy out = LogitResponse(q, in, tau);
  const Vector u = q * in.nu / tau;
  const Vector w = -q.transpose() * in.mu / tau;
  const double zu = std::exp(u[0]) + std::exp(u[1]);
  const double zw = std::exp(w[0]) + std::exp(w[1]) + std::exp(w[2]);
  for (int a = 0; a < 2; ++a) EXPECT_NEAR(out.mu[a], std::exp(u[a]) / zu, 1e-15);
  for (int b = 0; b < 3; ++b) EXPECT_NEAR(out.nu[b], std::exp(w[b]) / zw, 1e-15);
}

TEST(LogitResponseTest, NoOverflowAtTinyTemperature) {
  const JointPolicy out =
      LogitResponse(Game23(), JointPolicy::Uniform(2, 3), 1e-6);
  EXPECT_TRUE(out.mu.allFinite());
  EXPECT_TRUE(out.nu.allFinite());
  EXPECT_NEAR(out.mu.sum(), 1.0, 1e-15);
}

TEST(LogitResponseTest, RejectsNonPositiveTemperature) {
  EXPECT_THROW(LogitResponse(Game23(), JointPolicy::Uniform(2, 3), 0.0),
               InvalidArgument);
  EXPECT_THROW(LogitResponse(Game23(), JointPolicy::Uniform(2, 3), -1.0),
               InvalidArgument);
}

TEST(SolverConfigTest, ValidatesFields) {
  EXPECT_NO_THROW(SolverConfig{}.Validate());
  EXPECT_THROW(SolverConfig{.tol = 0.0}.Validate(), InvalidArgument);
  EXPECT_THROW(SolverConfig{.damping = 0.0}.Validate(), InvalidArgument);
  EXPECT_THROW(SolverConfig{.damping = 1.5}.Validate(), InvalidArgument);
  EXPECT_THROW(SolverConfig{.max_iter = 0}.Validate(), InvalidArgument);
}

TEST(SolveMatrixQreTest, ZeroPayoffIsExactUniformInOneIteration) {
  const QreSolution sol = SolveMatrixQre(Matrix::Zero(4, 3), 0.5);
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.residual, 0.0);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_LT(MaxAbs(sol.policy.mu, Vector::Constant(4, 0.25)), 1e-16);
}

TEST(SolveMatrixQreTest, MatchingPenniesIsUniform) {
  const QreSolution sol = SolveMatrixQre(MatchingPennies(), 1.0);
  ASSERT_TRUE(sol.converged);
  EXPECT_LT(sol.residual, 1e-9);
  EXPECT_LT(MaxAbs(sol.policy.mu, Vector::Constant(2, 0.5)), 1e-9);
  EXPECT_LT(MaxAbs(sol.policy.nu, Vector::Constant(2, 0.5)), 1e-9);
}

TEST(SolveMatrixQreTest, MatchesHighPrecisionOracle) {
  const QreSolution sol = SolveMatrixQre(Game23(), 0.7, SolverConfig{.tol = 1e-13});
  ASSERT_TRUE(sol.converged);
  for (int a = 0; a < 2; ++a) EXPECT_NEAR(sol.policy.mu[a], frozen::kQre23Mu[a], 1e-12);
  for (int b = 0; b < 3; ++b) EXPECT_NEAR(sol.policy.nu[b], frozen::kQre23Nu[b], 1e-12);
}

TEST(SolveMatrixQreTest, MatchesOracleAtLowTemperature) {
  const QreSolution sol = SolveMatrixQre(Game23(), 0.05);
  ASSERT_TRUE(sol.converged);
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(sol.policy.mu[a], frozen::kQre23ColdMu[a], 1e-8);
  }
  for (int b = 0; b < 3; ++b) {
    EXPECT_NEAR(sol.policy.nu[b], frozen::kQre23ColdNu[b], 1e-8);
  }
}

TEST(SolveMatrixQreTest, ConvergedSolutionsPassSubstitutionCheck) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (double tau : {0.1, 0.5, 2.0, 5.0}) {
      const MatrixGameSpec g = GenerateMatrixGame(10, 10, 5, tau, 1.0, Seed{seed});
      const QreSolution sol = SolveMatrixQre(g.Payoff(), tau);
      ASSERT_TRUE(sol.converged) << "seed " << seed << " tau " << tau;
      EXPECT_LE(sol.residual, 1e-9);
      EXPECT_LT(CertificateResidual(g.Payoff(), sol.policy, tau), 1e-9);
      EXPECT_NEAR(sol.policy.mu.sum(), 1.0, 1e-12);
      EXPECT_NEAR(sol.policy.nu.sum(), 1.0, 1e-12);
    }
  }
}

TEST(SolveMatrixQreTest, FallbackRescuesTruncatedIteration) {
  const MatrixGameSpec g = GenerateMatrixGame(8, 8, 4, 0.2, 1.0, Seed{6});
  const QreSolution sol =
      SolveMatrixQre(g.Payoff(), 0.2, SolverConfig{.max_iter = 3});
  ASSERT_TRUE(sol.converged);
  EXPECT_TRUE(sol.used_fallback);
  EXPECT_LT(CertificateResidual(g.Payoff(), sol.policy, 0.2), 1e-9);
}

TEST(SolveMatrixQreTest, ReportsFailureWithoutFallback) {
  const MatrixGameSpec g = GenerateMatrixGame(8, 8, 4, 0.2, 1.0, Seed{6});
  const QreSolution sol = SolveMatrixQre(
      g.Payoff(), 0.2, SolverConfig{.max_iter = 3, .fallback = false});
  EXPECT_FALSE(sol.converged);
  EXPECT_GT(sol.residual, 1e-9);
}

TEST(SolveMatrixQreTest, ScaleCovariance) {
  const MatrixGameSpec g = GenerateMatrixGame(7, 5, 3, 1.0, 1.0, Seed{21});
  const QreSolution base = SolveMatrixQre(g.Payoff(), 0.8);
  for (double k : {0.1, 3.0, 10.0}) {
    const QreSolution scaled = SolveMatrixQre(k * g.Payoff(), k * 0.8);
    EXPECT_LT(MaxAbs(scaled.policy.mu, base.policy.mu), 1e-8);
    EXPECT_LT(MaxAbs(scaled.policy.nu, base.policy.nu), 1e-8);
  }
}

TEST(SolveMatrixQreTest, ConstantShiftLeavesPoliciesUnchanged) {
  const MatrixGameSpec g = GenerateMatrixGame(5, 6, 3, 1.0, 1.0, Seed{2});
  const QreSolution base = SolveMatrixQre(g.Payoff(), 1.0);
  const QreSolution shifted =
      SolveMatrixQre((g.Payoff().array() + 4.0).matrix(), 1.0);
  EXPECT_LT(MaxAbs(shifted.policy.mu, base.policy.mu), 1e-8);
  EXPECT_LT(MaxAbs(shifted.policy.nu, base.policy.nu), 1e-8);
}

TEST(LogitResponseTest, ColumnShiftTiltsNuOnly) {
  // Adding c_b to column b adds sum_b c_b nu_b to every row payoff, so mu's
  // response is unchanged, and nu's logit b drops by c_b / tau.
  const MatrixGameSpec g = GenerateMatrixGame(5, 4, 3, 1.0, 1.0, Seed{8});
  const double tau = 0.9;
  Vector c(4);
  c << 0.3, -0.2, 0.0, 0.5;
  Matrix shifted = g.Payoff();
  for (int b = 0; b < 4; ++b) shifted.col(b).array() += c[b];
  const JointPolicy p = SolveMatrixQre(g.Payoff(), tau).policy;
  const JointPolicy base = LogitResponse(g.Payoff(), p, tau);
  const JointPolicy tilted = LogitResponse(shifted, p, tau);
  EXPECT_LT(MaxAbs(tilted.mu, base.mu), 1e-14);
  const Vector expected_nu =
      Softmax(base.nu.array().log().matrix() - c / tau);
  EXPECT_GT(MaxAbs(tilted.nu, base.nu), 1e-3);
  EXPECT_LT(MaxAbs(tilted.nu, expected_nu), 1e-14);
  // The shifted game's own equilibrium still certifies.
  const QreSolution sol = SolveMatrixQre(shifted, tau, SolverConfig{.tol = 1e-12});
  EXPECT_LT(CertificateResidual(shifted, sol.policy, tau), 1e-12);
}

TEST(SolveMatrixQreTest, RejectsNonPositiveTemperature) {
  EXPECT_THROW(SolveMatrixQre(Game23(), 0.0), InvalidArgument);
}

TEST(PoliciesFromQTablesTest, ZeroTablesGiveUniform) {
  const MarkovQreSolution sol =
      PoliciesFromQTables(StateTables(3, Matrix::Zero(2, 4)), 1.0);
  ASSERT_TRUE(sol.converged);
  for (const auto& p : sol.policies) {
    EXPECT_LT(MaxAbs(p.mu, Vector::Constant(2, 0.5)), 1e-16);
    EXPECT_LT(MaxAbs(p.nu, Vector::Constant(4, 0.25)), 1e-16);
  }
}

TEST(PoliciesFromQTablesTest, SingleStateMatchesMatrixSolve) {
  const MatrixGameSpec g = GenerateMatrixGame(4, 4, 2, 1.0, 1.0, Seed{4});
  const MarkovQreSolution markov = PoliciesFromQTables({g.Payoff()}, 0.6);
  const QreSolution matrix = SolveMatrixQre(g.Payoff(), 0.6);
  EXPECT_EQ(markov.policies[0].mu, matrix.policy.mu);
  EXPECT_EQ(markov.policies[0].nu, matrix.policy.nu);
  EXPECT_NEAR(markov.v[0], RegularizedValue(g.Payoff(), matrix.policy, 0.6),
              1e-15);
}

TEST(PoliciesFromQTablesTest, ReportsFailingState) {
  const MatrixGameSpec g = GenerateMatrixGame(8, 8, 4, 0.2, 1.0, Seed{6});
  const MarkovQreSolution sol = PoliciesFromQTables(
      {Matrix::Zero(8, 8), g.Payoff()}, 0.2,
      SolverConfig{.max_iter = 3, .fallback = false});
  EXPECT_FALSE(sol.converged);
  ASSERT_TRUE(sol.failed_state.has_value());
  EXPECT_EQ(*sol.failed_state, 1);
}

TransitionTensor TwoStateKernel() {
  return TransitionTensor(2, 2, 2,
                          {0.9, 0.1, 0.2, 0.8, 0.5, 0.5, 0.0, 1.0,
                           0.3, 0.7, 1.0, 0.0, 0.6, 0.4, 0.25, 0.75});
}

StateTables TwoStateReward() {
  Matrix r0(2, 2), r1(2, 2);
  r0 << 1, -1, 0, 2;
  r1 << 0.5, 0, -1, 1;
  return {r0, r1};
}

TEST(ForwardSolveMarkovTest, MatchesHighPrecisionOracle) {
  const MarkovQreSolution sol = ForwardSolveMarkov(
      TwoStateReward(), TwoStateKernel(), 0.5, 1.0, SolverConfig{.tol = 1e-13});
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.v[0], frozen::kMarkovValues[0], 1e-11);
  EXPECT_NEAR(sol.v[1], frozen::kMarkovValues[1], 1e-11);
}

TEST(ForwardSolveMarkovTest, ZeroDiscountIsOneSweepWithQEqualR) {
  const StateTables r = TwoStateReward();
  const MarkovQreSolution sol = ForwardSolveMarkov(r, TwoStateKernel(), 0.0, 1.0);
  ASSERT_TRUE(sol.converged);
  EXPECT_EQ(sol.iterations, 1);
  for (int s = 0; s < 2; ++s) EXPECT_EQ(MaxAbs(sol.q[s], r[s]), 0.0);
}

TEST(ForwardSolveMarkovTest, ZeroRewardGivesZeroValueAndUniformPlay) {
  const MarkovQreSolution sol = ForwardSolveMarkov(
      StateTables(2, Matrix::Zero(2, 2)), TwoStateKernel(), 0.9, 1.0);
  ASSERT_TRUE(sol.converged);
  EXPECT_LT(sol.v.cwiseAbs().maxCoeff(), 1e-15);
  for (const auto& p : sol.policies) {
    EXPECT_LT(MaxAbs(p.mu, Vector::Constant(2, 0.5)), 1e-15);
  }
}

TEST(ForwardSolveMarkovTest, ValueMatchesRegularizedValueAtEveryState) {
  const MarkovQreSolution sol =
      ForwardSolveMarkov(TwoStateReward(), TwoStateKernel(), 0.7, 0.5);
  ASSERT_TRUE(sol.converged);
  for (int s = 0; s < 2; ++s) {
    EXPECT_NEAR(sol.v[s], RegularizedValue(sol.q[s], sol.policies[s], 0.5), 1e-12);
  }
}

TEST(ForwardSolveMarkovTest, RoundTripsGeneratedGame) {
  const MarkovGameSpec g =
      GenerateMarkovGame(8, 5, 5, 6, 1.5, 1.0, 0.9, Seed{77});
  const MarkovQreSolution sol = ForwardSolveMarkov(
      g.reward, g.transitions, 0.9, 1.5, SolverConfig{.tol = 1e-12});
  ASSERT_TRUE(sol.converged);
  EXPECT_LT(MaxAbs(sol.v, g.equilibrium.v), 1e-6);
  for (int s = 0; s < 8; ++s) {
    EXPECT_LT(MaxAbs(sol.q[s], g.equilibrium.q[s]), 1e-6);
    EXPECT_LT(MaxAbs(sol.policies[s].mu, g.equilibrium.policies[s].mu), 1e-6);
    EXPECT_LT(MaxAbs(sol.policies[s].nu, g.equilibrium.policies[s].nu), 1e-6);
  }
}

TEST(ForwardSolveMarkovTest, ValueIterationContractsAtDiscountRate) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const MarkovGameSpec g =
        GenerateMarkovGame(6, 4, 4, 5, 1.0, 2.0, 0.8, Seed{seed});
    const MarkovQreSolution sol = ForwardSolveMarkov(
        g.reward, g.transitions, 0.8, 1.0, SolverConfig{.tol = 1e-12});
    ASSERT_TRUE(sol.converged);
    const auto& deltas = sol.value_deltas;
    ASSERT_GE(deltas.size(), 10u);
    // Asymptotic ratio over the later sweeps, above the solver noise floor.
    for (std::size_t t = deltas.size() / 2; t + 1 < deltas.size(); ++t) {
      if (deltas[t] < 1e-9) break;
      EXPECT_LE(deltas[t + 1] / deltas[t], 0.8 + 0.02) << "sweep " << t;
    }
  }
}

TEST(ForwardSolveMarkovTest, RejectsInvalidInputs) {
  EXPECT_THROW(ForwardSolveMarkov(TwoStateReward(), TwoStateKernel(), 1.0, 1.0),
               InvalidArgument);
  EXPECT_THROW(ForwardSolveMarkov(TwoStateReward(), TwoStateKernel(), 0.5, 0.0),
               InvalidArgument);
  TransitionTensor bad(2, 2, 2, std::vector<double>(16, 0.3));
  EXPECT_THROW(ForwardSolveMarkov(TwoStateReward(), bad, 0.5, 1.0),
               InvalidArgument);
}

TEST(TotalVariationTest, HalfL1Distance) {
  EXPECT_DOUBLE_EQ(TotalVariation(Vec({0.5, 0.5}), Vec({1.0, 0.0})), 0.5);
  EXPECT_EQ(TotalVariation(Vec({0.2, 0.8}), Vec({0.2, 0.8})), 0.0);
}

}  // namespace
}  // namespace qrinv
