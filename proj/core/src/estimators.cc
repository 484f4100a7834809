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
#include <numbers>

#include "qrinv/qre_solver.h"

namespace qrinv {

Vector MinimumNormLeastSquares(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) {
    throw InvalidArgument("least squares: X and y have different row counts");
  }
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? kRankTolerance * sv[0] : 0.0;
  Vector uty = svd.matrixU().transpose() * y;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    uty[i] = sv[i] > cutoff ? uty[i] / sv[i] : 0.0;
  }
  return svd.matrixV() * uty;
}

EstimationResult NlsEstimate(const LinearSystem& system, double norm_c) {
  if (!(norm_c > 0.0)) throw InvalidArgument("normalization C must be positive");
  EstimationResult out;
  out.identifiability =
      CheckIdentifiability(system, static_cast<int>(system.x.cols()));
  out.theta_ls = MinimumNormLeastSquares(system.x, system.y);
  const double ls_norm = out.theta_ls.norm();
  if (!(ls_norm > kYZeroTolerance)) {
    throw NonUniformityViolation(
        "non-uniformity condition violated: the least-squares solution is "
        "zero, so the observed play carries no scale information");
  }
  out.tau_hat = norm_c / ls_norm;
  out.theta_hat = out.tau_hat * out.theta_ls;
  out.residual = BilinearResidual(system, out.theta_hat, out.tau_hat);
  return out;
}

Vector StandardIgtEstimate(const LinearSystem& system, double tau_assumed) {
  if (!(tau_assumed > 0.0)) {
    throw InvalidArgument("assumed temperature must be positive");
  }
  const Vector theta_ls = MinimumNormLeastSquares(system.x, system.y);
  if (!(theta_ls.norm() > kYZeroTolerance)) {
    throw NonUniformityViolation(
        "non-uniformity condition violated: the least-squares solution is "
        "zero");
  }
  return tau_assumed * theta_ls;
}

const char* ToString(DynamicsMode mode) {
  return mode == DynamicsMode::kKnownP ? "known-p" : "estimated-p";
}

DynamicsMode ParseDynamicsMode(const std::string& text) {
  if (text == "known-p") return DynamicsMode::kKnownP;
  if (text == "estimated-p") return DynamicsMode::kEstimatedP;
  throw InvalidArgument("unknown dynamics mode '" + text +
                        "' (expected known-p or estimated-p)");
}

MarkovRecovery RecoverMarkovRewards(const LinearSystem& system, double norm_r,
                                    const FeatureMap& features,
                                    const std::vector<JointPolicy>& policies,
                                    const TransitionTensor& transitions_used,
                                    double gamma, DynamicsMode mode) {
  return RecoverMarkovRewards(NlsEstimate(system, norm_r), features, policies,
                              transitions_used, gamma, mode);
}

MarkovRecovery RecoverMarkovRewards(const EstimationResult& estimate,
                                    const FeatureMap& features,
                                    const std::vector<JointPolicy>& policies,
                                    const TransitionTensor& transitions_used,
                                    double gamma, DynamicsMode mode) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidArgument("discount must lie in [0, 1)");
  }
  if (transitions_used.num_states() != features.num_states() ||
      transitions_used.rows() != features.rows() ||
      transitions_used.cols() != features.cols()) {
    throw InvalidArgument("transition tensor shape does not match features");
  }
  if (transitions_used.StochasticityError() > 1e-9) {
    throw InvalidArgument("transition tensor is not stochastic");
  }
  if (static_cast<int>(policies.size()) != features.num_states()) {
    throw InvalidArgument("need one policy per state");
  }
  MarkovRecovery out;
  out.estimate = estimate;
  out.dynamics_mode = mode;
  out.q_hat = BuildQTables(features, estimate.theta_hat);
  out.v_hat.resize(features.num_states());
  for (int s = 0; s < features.num_states(); ++s) {
    out.v_hat[s] = RegularizedValue(out.q_hat[s], policies[s], estimate.tau_hat);
  }
  out.r_hat = BellmanInversion(out.q_hat, out.v_hat, transitions_used, gamma);
  return out;
}

void ConfidenceConfig::Validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  if (!(xi > 0.0)) throw InvalidArgument("xi must be positive");
  if (!(feature_bound > 0.0)) throw InvalidArgument("L must be positive");
  if (!(norm_c > 0.0)) throw InvalidArgument("C must be positive");
  if (!(tau_max > 0.0)) throw InvalidArgument("tau_max must be positive");
  if (m < 1 || n < 1) throw InvalidArgument("m and n must be positive");
  if (samples < 1) throw InvalidArgument("N must be positive");
}

ConfidenceConstants ComputeConfidenceConstants(const ConfidenceConfig& config) {
  config.Validate();
  const double log2 = std::numbers::ln2;
  const double big_n = static_cast<double>(config.samples);
  // log(2 * 2^k / delta) without forming 2^k.
  auto eps = [&](int k) {
    return std::sqrt(2.0 * ((k + 1) * log2 - std::log(config.delta)) / big_n);
  };
  ConfidenceConstants c;
  c.eps_mu = eps(config.m);
  c.eps_nu = eps(config.n);
  c.eps_n = c.eps_mu + c.eps_nu;
  const double mn = static_cast<double>(config.m + config.n);
  c.c_x = 2.0 * config.feature_bound * std::sqrt(mn);
  c.c_y = std::sqrt(8.0 * mn) / config.xi;
  const double lead = c.c_x * config.norm_c + c.c_y * config.tau_max;
  c.kappa = lead * lead * c.eps_n * c.eps_n;
  return c;
}

double ConfidenceThreshold(const ConfidenceConfig& config) {
  return ComputeConfidenceConstants(config).kappa;
}

bool ConfidenceContains(const LinearSystem& system, const Vector& theta,
                        double tau, double kappa, double norm_c) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (std::abs(theta.norm() - norm_c) > 1e-9 * norm_c) return false;
  const double r = BilinearResidual(system, theta, tau);
  return r * r <= kappa;
}

double PlugInSoftMinGap(std::span<const JointPolicy> policies) {
  double gap = 1.0;
  for (const JointPolicy& p : policies) {
    gap = std::min({gap, p.mu.minCoeff(), p.nu.minCoeff()});
  }
  return gap;
}

std::vector<ConfidenceScanPoint> ScanConfidenceSet(
    const LinearSystem& system, double norm_c, double kappa,
    int num_directions, std::span<const double> tau_grid, Rng& rng) {
  if (num_directions < 1) throw InvalidArgument("need at least one direction");
  const Eigen::Index d = system.x.cols();
  std::vector<Vector> directions;
  directions.reserve(num_directions);
  const Vector ls = MinimumNormLeastSquares(system.x, system.y);
  if (ls.norm() > kYZeroTolerance) directions.push_back(ls * (norm_c / ls.norm()));
  while (static_cast<int>(directions.size()) < num_directions) {
    Vector v(d);
    for (Eigen::Index k = 0; k < d; ++k) v[k] = rng.StandardNormal();
    directions.push_back(v * (norm_c / v.norm()));
  }
  std::vector<ConfidenceScanPoint> out;
  out.reserve(directions.size() * tau_grid.size());
  for (const Vector& theta : directions) {
    for (double tau : tau_grid) {
      ConfidenceScanPoint pt;
      pt.theta = theta;
      pt.tau = tau;
      const double r = BilinearResidual(system, theta, tau);
      pt.residual_sq = r * r;
      pt.inside = ConfidenceContains(system, theta, tau, kappa, norm_c);
      out.push_back(std::move(pt));
    }
  }
  return out;
}

}  // namespace qrinv
