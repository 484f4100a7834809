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

#ifndef QRINV_GAME_MODELS_H_
#define QRINV_GAME_MODELS_H_

#include <span>
#include <vector>

#include "qrinv/qre_solver.h"
#include "qrinv/rng.h"
#include "qrinv/types.h"

namespace qrinv {

enum class FeatureKind { kMatrix, kMarkov };

// Feature vectors phi(s, a, b) in R^d, row-major with the feature index
// fastest: values[((s * m + a) * n + b) * d + k]. Matrix games have one
// state. The bound L = max |phi|_2 is computed on construction.
class FeatureMap {
 public:
  FeatureMap() = default;

  static FeatureMap ForMatrixGame(int m, int n, int d,
                                  std::vector<double> values);
  static FeatureMap ForMarkovGame(int num_states, int m, int n, int d,
                                  std::vector<double> values);

  FeatureKind kind() const { return kind_; }
  int num_states() const { return num_states_; }
  int rows() const { return m_; }
  int cols() const { return n_; }
  int dim() const { return d_; }
  double bound() const { return bound_; }

  std::span<const double> At(int s, int a, int b) const {
    return {values_.data() + Offset(s, a, b), static_cast<std::size_t>(d_)};
  }
  std::span<const double> At(int a, int b) const { return At(0, a, b); }
  Eigen::Map<const Vector> Vec(int s, int a, int b) const {
    return Eigen::Map<const Vector>(values_.data() + Offset(s, a, b), d_);
  }

  // Matrix-game feature map of one state of a Markov feature map.
  FeatureMap StateSlice(int s) const;
  // Keeps only the listed feature coordinates, in the given order.
  FeatureMap SelectDims(std::span<const int> dims) const;
  // Design matrix with one row per (s, a, b) in storage order.
  Matrix DesignMatrix() const;

  // Max feature norm recomputed from the stored values.
  double ComputeBound() const;

  const std::vector<double>& values() const { return values_; }

 private:
  FeatureMap(FeatureKind kind, int num_states, int m, int n, int d,
             std::vector<double> values);

  std::size_t Offset(int s, int a, int b) const {
    return ((static_cast<std::size_t>(s) * m_ + a) * n_ + b) * d_;
  }

  FeatureKind kind_ = FeatureKind::kMatrix;
  int num_states_ = 1;
  int m_ = 0;
  int n_ = 0;
  int d_ = 0;
  double bound_ = 0.0;
  std::vector<double> values_;
};

struct MatrixGameSpec {
  FeatureMap features;
  Vector theta_star;
  double tau_star = 1.0;
  double norm_c = 1.0;  // |theta_star|_2

  Matrix Payoff() const;
};

struct MarkovGameSpec {
  FeatureMap features;
  Vector theta_star;
  double tau_star = 1.0;
  double norm_r = 1.0;  // |theta_star|_2
  double gamma = 0.9;
  TransitionTensor transitions;
  StateTables reward;  // r*, from Bellman inversion of Q*

  // Equilibrium induced by Q* = <phi, theta*>: policies, Q*, V*.
  MarkovQreSolution equilibrium;

  int num_states() const { return features.num_states(); }
  StateTables QTables() const;
};

// Q(a, b) = <phi(a, b), theta>.
Matrix BuildPayoffMatrix(const FeatureMap& features, const Vector& theta);

// Q(s, a, b) = <phi(s, a, b), theta> for every state.
StateTables BuildQTables(const FeatureMap& features, const Vector& theta);

// Features and theta drawn i.i.d. N(0, 1); theta rescaled to norm C.
MatrixGameSpec GenerateMatrixGame(int m, int n, int d, double tau_star,
                                  double norm_c, Seed seed);
MatrixGameSpec GenerateMatrixGame(int m, int n, int d, double tau_star,
                                  double norm_c, Rng& rng);

// Linear-Q Markov game: features and theta ~ N(0, 1) with |theta| = R,
// P(.|s,a,b) ~ Dirichlet(1), QRE policies and V* from Q*, then
// r* = Q* - gamma E_P[V*].
MarkovGameSpec GenerateMarkovGame(int num_states, int m, int n, int d,
                                  double tau_star, double norm_r, double gamma,
                                  Seed seed,
                                  const SolverConfig& solver = {.tol = 1e-12});
MarkovGameSpec GenerateMarkovGame(int num_states, int m, int n, int d,
                                  double tau_star, double norm_r, double gamma,
                                  Rng& rng,
                                  const SolverConfig& solver = {.tol = 1e-12});

// r = Q - gamma E_{s'~P}[V(s')].
StateTables BellmanInversion(const StateTables& q, const Vector& v,
                             const TransitionTensor& transitions,
                             double gamma);

}  // namespace qrinv

#endif  // QRINV_GAME_MODELS_H_
