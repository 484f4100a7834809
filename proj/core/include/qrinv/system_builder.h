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

// Linearized QRE constraints.
//
// Taking logs of the logit-response equations against reference action 0
// gives m + n - 2 equations that are linear in theta for fixed tau:
//   A(nu) theta = tau c(mu),   B(mu) theta = tau d(nu),
// stacked as X theta = tau y. For Markov games the per-state blocks are
// stacked in state order.

#ifndef QRINV_SYSTEM_BUILDER_H_
#define QRINV_SYSTEM_BUILDER_H_

#include <vector>

#include "qrinv/game_models.h"
#include "qrinv/types.h"

namespace qrinv {

inline constexpr double kRankTolerance = 1e-10;  // relative to sigma_max
inline constexpr double kYZeroTolerance = 1e-10;

struct RowRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  Eigen::Index size() const { return end - begin; }
};

struct LinearSystem {
  Matrix x;
  Vector y;
  // One entry per state: rows holding the player-1 (mu) and player-2 (nu)
  // constraints.
  std::vector<RowRange> rows_mu;
  std::vector<RowRange> rows_nu;
};

struct IdentifiabilityReport {
  int rank = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double y_norm = 0.0;
  bool identifiable = false;
};

// Requires strictly positive policies; zero entries must be floored first.
LinearSystem BuildSystem(const FeatureMap& features, const JointPolicy& policy);

LinearSystem BuildMarkovSystem(const FeatureMap& features,
                               const std::vector<JointPolicy>& policies);

IdentifiabilityReport CheckIdentifiability(const LinearSystem& system, int d);

// |X theta - tau y|_2.
double BilinearResidual(const LinearSystem& system, const Vector& theta,
                        double tau);

}  // namespace qrinv

#endif  // QRINV_SYSTEM_BUILDER_H_
