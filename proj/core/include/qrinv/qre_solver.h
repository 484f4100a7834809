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

// Quantal response equilibria of entropy-regularized zero-sum games.
//
// Player 1 (rows, mu) maximizes and player 2 (columns, nu) minimizes
//   mu' Q nu + tau H(mu) - tau H(nu).
// The unique saddle point satisfies the logit-response fixed point
//   mu = softmax(Q nu / tau),   nu = softmax(-Q' mu / tau).

#ifndef QRINV_QRE_SOLVER_H_
#define QRINV_QRE_SOLVER_H_

#include <optional>
#include <vector>

#include "qrinv/types.h"

namespace qrinv {

struct SolverConfig {
  double tol = 1e-9;       // sup-norm fixed-point residual
  int max_iter = 20000;    // damped fixed-point iterations
  double damping = 0.5;    // weight on the fresh logit response
  bool fallback = true;    // Newton in logit coordinates after max_iter
  int newton_max_iter = 100;

  void Validate() const;
};

struct QreSolution {
  JointPolicy policy;
  Matrix payoff;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool used_fallback = false;
};

// Equilibrium of a Markov game: per-state policies and Q tables, plus V.
struct MarkovQreSolution {
  std::vector<JointPolicy> policies;
  StateTables q;
  Vector v;
  double residual = 0.0;  // worst per-state fixed-point residual
  int iterations = 0;     // outer value-iteration sweeps
  bool converged = false;
  std::optional<int> failed_state;
  // Sup-norm change of V at each outer sweep.
  std::vector<double> value_deltas;
};

// Shannon entropy in nats; zero entries contribute 0.
double Entropy(const Vector& pi);

double RegularizedValue(const Matrix& q, const JointPolicy& policy, double tau);

// Numerically stable softmax(z).
Vector Softmax(const Vector& z);

// Simultaneous logit responses to the given policy.
JointPolicy LogitResponse(const Matrix& q, const JointPolicy& policy,
                          double tau);

// max(|mu - logit_mu(nu)|_inf, |nu - logit_nu(mu)|_inf).
double FixedPointResidual(const Matrix& q, const JointPolicy& policy,
                          double tau);

QreSolution SolveMatrixQre(const Matrix& q, double tau,
                           const SolverConfig& config = {},
                           const JointPolicy* warm_start = nullptr);

// Solves the matrix QRE at every state of a directly parameterized Q table
// and evaluates V(s) from it. On failure, converged is false and
// failed_state names the first offending state.
MarkovQreSolution PoliciesFromQTables(const StateTables& q, double tau,
                                      const SolverConfig& config = {});

// Regularized value iteration: Q_t = r + gamma P V_t, per-state QRE, V_{t+1}
// from the regularized value. Stops once |V_{t+1} - V_t|_inf <=
// tol (1 - gamma).
MarkovQreSolution ForwardSolveMarkov(const StateTables& reward,
                                     const TransitionTensor& transitions,
                                     double gamma, double tau,
                                     const SolverConfig& config = {},
                                     int max_sweeps = 10000);

// 0.5 |p - q|_1.
double TotalVariation(const Vector& p, const Vector& q);

}  // namespace qrinv

#endif  // QRINV_QRE_SOLVER_H_
