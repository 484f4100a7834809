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

#include "qrinv/system_builder.h"

#include <cmath>
#include <sstream>
#include <string>

namespace qrinv {
namespace {

void CheckPositive(const Vector& p, const char* who) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) {
      std::ostringstream os;
      os << who << "[" << i << "] = " << p[i]
         << "; log-ratios need strictly positive probabilities (apply a floor "
            "to the empirical policy)";
      throw InvalidArgument(os.str());
    }
  }
}

// Writes the constraints of one state into rows starting at offset.
void FillBlock(const FeatureMap& features, int s, const JointPolicy& policy,
               Matrix& x, Vector& y, Eigen::Index offset) {
  const int m = features.rows();
  const int n = features.cols();
  const int d = features.dim();
  if (policy.mu.size() != m || policy.nu.size() != n) {
    throw InvalidArgument("policy shape does not match features");
  }
  CheckPositive(policy.mu, "mu");
  CheckPositive(policy.nu, "nu");

  // A(nu): row a-1 = sum_b nu(b) (phi(a, b) - phi(0, b)).
  Matrix expected_row(m, d);  // sum_b nu(b) phi(a, b)
  for (int a = 0; a < m; ++a) {
    Vector acc = Vector::Zero(d);
    for (int b = 0; b < n; ++b) acc += policy.nu[b] * features.Vec(s, a, b);
    expected_row.row(a) = acc.transpose();
  }
  for (int a = 1; a < m; ++a) {
    x.row(offset + a - 1) = expected_row.row(a) - expected_row.row(0);
    y[offset + a - 1] = std::log(policy.mu[a] / policy.mu[0]);
  }

  // B(mu): row b-1 = sum_a mu(a) (phi(a, 0) - phi(a, b)).
  Matrix expected_col(n, d);  // sum_a mu(a) phi(a, b)
  for (int b = 0; b < n; ++b) {
    Vector acc = Vector::Zero(d);
    for (int a = 0; a < m; ++a) acc += policy.mu[a] * features.Vec(s, a, b);
    expected_col.row(b) = acc.transpose();
  }
  const Eigen::Index nu_offset = offset + m - 1;
  for (int b = 1; b < n; ++b) {
    x.row(nu_offset + b - 1) = expected_col.row(0) - expected_col.row(b);
    y[nu_offset + b - 1] = std::log(policy.nu[b] / policy.nu[0]);
  }
}

}  // namespace

LinearSystem BuildSystem(const FeatureMap& features,
                         const JointPolicy& policy) {
  if (features.num_states() != 1) {
    throw InvalidArgument("BuildSystem needs single-state features");
  }
  return BuildMarkovSystem(features, {policy});
}

LinearSystem BuildMarkovSystem(const FeatureMap& features,
                               const std::vector<JointPolicy>& policies) {
  const int num_states = features.num_states();
  if (static_cast<int>(policies.size()) != num_states) {
    throw InvalidArgument("need one policy per state");
  }
  const Eigen::Index per_state = features.rows() + features.cols() - 2;
  LinearSystem sys;
  sys.x.resize(per_state * num_states, features.dim());
  sys.y.resize(per_state * num_states);
  for (int s = 0; s < num_states; ++s) {
    const Eigen::Index offset = per_state * s;
    try {
      FillBlock(features, s, policies[s], sys.x, sys.y, offset);
    } catch (const InvalidArgument& e) {
      if (num_states == 1) throw;
      throw InvalidArgument("state " + std::to_string(s) + ": " + e.what());
    }
    sys.rows_mu.push_back({offset, offset + features.rows() - 1});
    sys.rows_nu.push_back({offset + features.rows() - 1, offset + per_state});
  }
  return sys;
}

IdentifiabilityReport CheckIdentifiability(const LinearSystem& system,
                                           int d) {
  IdentifiabilityReport report;
  report.y_norm = system.y.norm();
  if (system.x.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(system.x);
    const Vector& sv = svd.singularValues();
    report.sigma_max = sv.size() > 0 ? sv[0] : 0.0;
    const double cutoff = kRankTolerance * report.sigma_max;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] > cutoff) ++report.rank;
    }
    // Columns beyond the row count contribute zero singular values.
    report.sigma_min = system.x.cols() > system.x.rows() ? 0.0 : sv.minCoeff();
  }
  report.identifiable = report.rank == d && report.y_norm > kYZeroTolerance;
  return report;
}

double BilinearResidual(const LinearSystem& system, const Vector& theta,
                        double tau) {
  if (theta.size() != system.x.cols()) {
    throw InvalidArgument("theta length does not match system columns");
  }
  return (system.x * theta - tau * system.y).norm();
}

}  // namespace qrinv
