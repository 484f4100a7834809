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

#include "qrinv/game_models.h"

#include <cmath>
#include <sstream>
#include <string>

namespace qrinv {
namespace {

void CheckDims(int m, int n, int d) {
  if (m < 1 || n < 1 || d < 1) {
    std::ostringstream os;
    os << "invalid dimensions m=" << m << " n=" << n << " d=" << d;
    throw InvalidArgument(os.str());
  }
}

Vector NormalizedNormal(Rng& rng, int d, double norm) {
  Vector theta(d);
  for (int k = 0; k < d; ++k) theta[k] = rng.StandardNormal();
  const double len = theta.norm();
  if (!(len > 0.0)) throw NumericalError("drew a zero parameter vector");
  return theta * (norm / len);
}

}  // namespace

FeatureMap::FeatureMap(FeatureKind kind, int num_states, int m, int n, int d,
                       std::vector<double> values)
    : kind_(kind),
      num_states_(num_states),
      m_(m),
      n_(n),
      d_(d),
      values_(std::move(values)) {
  CheckDims(m, n, d);
  if (num_states < 1) throw InvalidArgument("need at least one state");
  if (values_.size() != static_cast<std::size_t>(num_states) * m * n * d) {
    throw InvalidArgument("feature values have the wrong length");
  }
  bound_ = ComputeBound();
}

FeatureMap FeatureMap::ForMatrixGame(int m, int n, int d,
                                     std::vector<double> values) {
  return FeatureMap(FeatureKind::kMatrix, 1, m, n, d, std::move(values));
}

FeatureMap FeatureMap::ForMarkovGame(int num_states, int m, int n, int d,
                                     std::vector<double> values) {
  return FeatureMap(FeatureKind::kMarkov, num_states, m, n, d,
                    std::move(values));
}

double FeatureMap::ComputeBound() const {
  double worst = 0.0;
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < m_; ++a) {
      for (int b = 0; b < n_; ++b) worst = std::max(worst, Vec(s, a, b).norm());
    }
  }
  return worst;
}

FeatureMap FeatureMap::StateSlice(int s) const {
  if (s < 0 || s >= num_states_) throw InvalidArgument("state out of range");
  const std::size_t begin = Offset(s, 0, 0);
  const std::size_t len = static_cast<std::size_t>(m_) * n_ * d_;
  return ForMatrixGame(
      m_, n_, d_,
      std::vector<double>(values_.begin() + begin,
                          values_.begin() + begin + len));
}

FeatureMap FeatureMap::SelectDims(std::span<const int> dims) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(num_states_) * m_ * n_ * dims.size());
  for (int k : dims) {
    if (k < 0 || k >= d_) throw InvalidArgument("feature index out of range");
  }
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < m_; ++a) {
      for (int b = 0; b < n_; ++b) {
        auto phi = At(s, a, b);
        for (int k : dims) out.push_back(phi[k]);
      }
    }
  }
  return FeatureMap(kind_, num_states_, m_, n_, static_cast<int>(dims.size()),
                    std::move(out));
}

Matrix FeatureMap::DesignMatrix() const {
  Matrix design(static_cast<Eigen::Index>(num_states_) * m_ * n_, d_);
  Eigen::Index row = 0;
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < m_; ++a) {
      for (int b = 0; b < n_; ++b) design.row(row++) = Vec(s, a, b);
    }
  }
  return design;
}

Matrix MatrixGameSpec::Payoff() const {
  return BuildPayoffMatrix(features, theta_star);
}

StateTables MarkovGameSpec::QTables() const {
  return BuildQTables(features, theta_star);
}

Matrix BuildPayoffMatrix(const FeatureMap& features, const Vector& theta) {
  if (theta.size() != features.dim()) {
    throw InvalidArgument("theta has length " + std::to_string(theta.size()) +
                          ", features have dimension " +
                          std::to_string(features.dim()));
  }
  if (features.num_states() != 1) {
    throw InvalidArgument("payoff matrix needs single-state features");
  }
  Matrix q(features.rows(), features.cols());
  for (int a = 0; a < features.rows(); ++a) {
    for (int b = 0; b < features.cols(); ++b) {
      q(a, b) = features.Vec(0, a, b).dot(theta);
    }
  }
  return q;
}

StateTables BuildQTables(const FeatureMap& features, const Vector& theta) {
  StateTables out;
  out.reserve(features.num_states());
  for (int s = 0; s < features.num_states(); ++s) {
    out.push_back(BuildPayoffMatrix(features.StateSlice(s), theta));
  }
  return out;
}

MatrixGameSpec GenerateMatrixGame(int m, int n, int d, double tau_star,
                                  double norm_c, Seed seed) {
  Rng rng(seed);
  return GenerateMatrixGame(m, n, d, tau_star, norm_c, rng);
}

MatrixGameSpec GenerateMatrixGame(int m, int n, int d, double tau_star,
                                  double norm_c, Rng& rng) {
  if (m < 2 || n < 2 || d < 1) {
    throw InvalidArgument("matrix game needs m, n >= 2 and d >= 1");
  }
  if (!(tau_star > 0.0)) throw InvalidArgument("tau_star must be positive");
  if (!(norm_c > 0.0)) throw InvalidArgument("normalization C must be positive");
  MatrixGameSpec spec;
  spec.features = FeatureMap::ForMatrixGame(
      m, n, d, rng.Normals(static_cast<std::size_t>(m) * n * d));
  spec.theta_star = NormalizedNormal(rng, d, norm_c);
  spec.tau_star = tau_star;
  spec.norm_c = norm_c;
  return spec;
}

MarkovGameSpec GenerateMarkovGame(int num_states, int m, int n, int d,
                                  double tau_star, double norm_r, double gamma,
                                  Seed seed, const SolverConfig& solver) {
  Rng rng(seed);
  return GenerateMarkovGame(num_states, m, n, d, tau_star, norm_r, gamma, rng,
                            solver);
}

MarkovGameSpec GenerateMarkovGame(int num_states, int m, int n, int d,
                                  double tau_star, double norm_r, double gamma,
                                  Rng& rng, const SolverConfig& solver) {
  if (num_states < 1) throw InvalidArgument("need at least one state");
  if (m < 2 || n < 2 || d < 1) {
    throw InvalidArgument("Markov game needs m, n >= 2 and d >= 1");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidArgument("discount must lie in [0, 1)");
  }
  if (!(tau_star > 0.0)) throw InvalidArgument("tau_star must be positive");
  if (!(norm_r > 0.0)) throw InvalidArgument("normalization R must be positive");

  MarkovGameSpec spec;
  spec.features = FeatureMap::ForMarkovGame(
      num_states, m, n, d,
      rng.Normals(static_cast<std::size_t>(num_states) * m * n * d));
  spec.theta_star = NormalizedNormal(rng, d, norm_r);
  spec.tau_star = tau_star;
  spec.norm_r = norm_r;
  spec.gamma = gamma;

  spec.transitions = TransitionTensor(num_states, m, n);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < n; ++b) {
        const std::vector<double> row = rng.FlatDirichlet(num_states);
        std::copy(row.begin(), row.end(),
                  spec.transitions.MutableRow(s, a, b).begin());
      }
    }
  }

  spec.equilibrium = PoliciesFromQTables(spec.QTables(), tau_star, solver);
  if (!spec.equilibrium.converged) {
    throw NumericalError("QRE solve failed at state " +
                         std::to_string(spec.equilibrium.failed_state.value_or(-1)));
  }
  spec.reward = BellmanInversion(spec.equilibrium.q, spec.equilibrium.v,
                                 spec.transitions, gamma);
  return spec;
}

StateTables BellmanInversion(const StateTables& q, const Vector& v,
                             const TransitionTensor& transitions,
                             double gamma) {
  if (static_cast<int>(q.size()) != transitions.num_states()) {
    throw InvalidArgument("Q tables and transitions disagree on states");
  }
  StateTables r;
  r.reserve(q.size());
  for (int s = 0; s < transitions.num_states(); ++s) {
    r.push_back(q[s] - gamma * transitions.Expectation(s, v));
  }
  return r;
}

}  // namespace qrinv
