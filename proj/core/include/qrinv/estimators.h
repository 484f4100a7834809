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

#ifndef QRINV_ESTIMATORS_H_
#define QRINV_ESTIMATORS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrinv/game_models.h"
#include "qrinv/rng.h"
#include "qrinv/system_builder.h"
#include "qrinv/types.h"

namespace qrinv {

struct EstimationResult {
  Vector theta_hat;
  double tau_hat = 0.0;
  Vector theta_ls;  // estimate of theta* / tau*
  double residual = 0.0;  // |X theta_hat - tau_hat y|_2
  IdentifiabilityReport identifiability;
};

// Minimum-norm least-squares solution via SVD; singular values at or below
// kRankTolerance * sigma_max are treated as zero.
Vector MinimumNormLeastSquares(const Matrix& x, const Vector& y);

// Normalized least squares: theta_ls = argmin |X t - y|, tau = C / |theta_ls|,
// theta = tau theta_ls. Throws NonUniformityViolation when theta_ls
// vanishes. Rank-deficient systems still return the minimum-norm answer with
// identifiability.identifiable == false.
EstimationResult NlsEstimate(const LinearSystem& system, double norm_c);

// Known-temperature baseline: tau_assumed * theta_ls, no normalization.
Vector StandardIgtEstimate(const LinearSystem& system, double tau_assumed);

enum class DynamicsMode { kKnownP, kEstimatedP };

const char* ToString(DynamicsMode mode);
DynamicsMode ParseDynamicsMode(const std::string& text);

struct MarkovRecovery {
  EstimationResult estimate;
  StateTables q_hat;
  Vector v_hat;
  StateTables r_hat;
  DynamicsMode dynamics_mode = DynamicsMode::kKnownP;

  const Vector& theta_hat() const { return estimate.theta_hat; }
  double tau_hat() const { return estimate.tau_hat; }
};

// Runs NLS on the stacked system, then
//   Q(s,a,b) = <phi(s,a,b), theta>,
//   V(s) = mu(s)' Q(s) nu(s) + tau H(mu(s)) - tau H(nu(s)),
//   r = Q - gamma E_{P_used}[V].
MarkovRecovery RecoverMarkovRewards(const LinearSystem& system, double norm_r,
                                    const FeatureMap& features,
                                    const std::vector<JointPolicy>& policies,
                                    const TransitionTensor& transitions_used,
                                    double gamma,
                                    DynamicsMode mode = DynamicsMode::kKnownP);

// Reward recovery from an already computed estimate.
MarkovRecovery RecoverMarkovRewards(const EstimationResult& estimate,
                                    const FeatureMap& features,
                                    const std::vector<JointPolicy>& policies,
                                    const TransitionTensor& transitions_used,
                                    double gamma, DynamicsMode mode);

struct ConfidenceConfig {
  double delta = 0.05;
  double xi = 0.0;             // lower bound on every equilibrium probability
  double feature_bound = 1.0;  // L
  double norm_c = 1.0;         // C
  double tau_max = 1.0;
  int m = 0;
  int n = 0;
  std::int64_t samples = 0;  // N

  void Validate() const;
};

struct ConfidenceConstants {
  double eps_mu = 0.0;
  double eps_nu = 0.0;
  double eps_n = 0.0;
  double c_x = 0.0;
  double c_y = 0.0;
  double kappa = 0.0;
};

// eps_mu = sqrt(2 log(2 * 2^m / delta) / N), likewise eps_nu;
// C_X = 2 L sqrt(m + n), C_Y = sqrt(8 (m + n)) / xi;
// kappa = (C_X C + C_Y tau_max)^2 (eps_mu + eps_nu)^2.
ConfidenceConstants ComputeConfidenceConstants(const ConfidenceConfig& config);
double ConfidenceThreshold(const ConfidenceConfig& config);

// |X theta - tau y|^2 <= kappa and | |theta| - C | <= 1e-9 C.
bool ConfidenceContains(const LinearSystem& system, const Vector& theta,
                        double tau, double kappa, double norm_c);

// Plug-in soft-min gap: smallest probability in the (floored) policies.
// Tends to overstate the population gap, which shrinks kappa.
double PlugInSoftMinGap(std::span<const JointPolicy> policies);

struct ConfidenceScanPoint {
  Vector theta;
  double tau = 0.0;
  double residual_sq = 0.0;
  bool inside = false;
};

// Evaluates the membership predicate on (direction x tau) grid points.
// Directions are uniform on the C-sphere; the NLS direction is always
// included first.
std::vector<ConfidenceScanPoint> ScanConfidenceSet(
    const LinearSystem& system, double norm_c, double kappa,
    int num_directions, std::span<const double> tau_grid, Rng& rng);

}  // namespace qrinv

#endif  // QRINV_ESTIMATORS_H_
