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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace qrinv {
namespace {

constexpr double kProbFloor = 1e-300;

// Damped iteration is abandoned early for the Newton fallback when the
// residual fails to halve over this many steps.
constexpr int kStallWindow = 500;

void CheckTau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("temperature must be positive, got " +
                          std::to_string(tau));
  }
}

void CheckShape(const Matrix& q, const JointPolicy& policy) {
  if (q.rows() != policy.mu.size() || q.cols() != policy.nu.size()) {
    std::ostringstream os;
    os << "payoff is " << q.rows() << "x" << q.cols() << " but policy is "
       << policy.mu.size() << "/" << policy.nu.size();
    throw InvalidArgument(os.str());
  }
}

double SupDiff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Softmax of [0, logits] (reference action 0 pinned at zero).
Vector PinnedSoftmax(const Vector& logits) {
  Vector z(logits.size() + 1);
  z[0] = 0.0;
  z.tail(logits.size()) = logits;
  return Softmax(z);
}

Vector LogRatios(const Vector& p) {
  const Eigen::Index k = p.size();
  Vector out(k - 1);
  const double ref = std::log(std::max(p[0], kProbFloor));
  for (Eigen::Index i = 1; i < k; ++i) {
    out[i - 1] = std::log(std::max(p[i], kProbFloor)) - ref;
  }
  return out;
}

// d softmax([0, z]) / dz, shape k x (k - 1).
Matrix PinnedSoftmaxJacobian(const Vector& p) {
  const Eigen::Index k = p.size();
  Matrix jac(k, k - 1);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index c = 1; c < k; ++c) {
      jac(j, c - 1) = p[j] * ((j == c ? 1.0 : 0.0) - p[c]);
    }
  }
  return jac;
}

// Newton's method on the log-ratio form of the fixed point,
//   x - D1 nu(z) / tau = 0,   z + D2' mu(x) / tau = 0,
// with D1 = Q[1:, :] - Q[0, :] and D2 = Q[:, 1:] - Q[:, 0].
struct NewtonOutcome {
  JointPolicy policy;
  int iterations = 0;
};

NewtonOutcome NewtonPolish(const Matrix& q, double tau, JointPolicy start,
                           const SolverConfig& config) {
  const Eigen::Index m = q.rows();
  const Eigen::Index n = q.cols();
  const Matrix d1 = q.bottomRows(m - 1).rowwise() - q.row(0);
  const Matrix d2 = q.rightCols(n - 1).colwise() - q.col(0);

  Vector x = LogRatios(start.mu);
  Vector z = LogRatios(start.nu);

  auto residual = [&](const Vector& xs, const Vector& zs) {
    Vector g(xs.size() + zs.size());
    g.head(xs.size()) = xs - d1 * PinnedSoftmax(zs) / tau;
    g.tail(zs.size()) = zs + d2.transpose() * PinnedSoftmax(xs) / tau;
    return g;
  };

  NewtonOutcome out;
  Vector g = residual(x, z);
  for (int it = 0; it < config.newton_max_iter; ++it) {
    out.iterations = it + 1;
    JointPolicy current{PinnedSoftmax(x), PinnedSoftmax(z)};
    if (FixedPointResidual(q, current, tau) <= config.tol) break;

    const Matrix jac_mu = PinnedSoftmaxJacobian(current.mu);
    const Matrix jac_nu = PinnedSoftmaxJacobian(current.nu);
    const Eigen::Index dim = (m - 1) + (n - 1);
    Matrix jac = Matrix::Identity(dim, dim);
    jac.topRightCorner(m - 1, n - 1) = -d1 * jac_nu / tau;
    jac.bottomLeftCorner(n - 1, m - 1) = d2.transpose() * jac_mu / tau;

    const Vector step = -jac.fullPivLu().solve(g);
    if (!step.allFinite()) break;

    const double g_norm = g.norm();
    double t = 1.0;
    Vector x_new, z_new, g_new;
    for (;;) {
      x_new = x + t * step.head(m - 1);
      z_new = z + t * step.tail(n - 1);
      g_new = residual(x_new, z_new);
      if (g_new.norm() <= (1.0 - 1e-4 * t) * g_norm || t < 1e-10) break;
      t *= 0.5;
    }
    x = std::move(x_new);
    z = std::move(z_new);
    g = std::move(g_new);
  }
  out.policy = {PinnedSoftmax(x), PinnedSoftmax(z)};
  return out;
}

}  // namespace

void SolverConfig::Validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("solver tol must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw InvalidArgument("solver damping must lie in (0, 1]");
  }
  if (max_iter < 1) throw InvalidArgument("solver max_iter must be >= 1");
  if (newton_max_iter < 0) {
    throw InvalidArgument("solver newton_max_iter must be >= 0");
  }
}

double Entropy(const Vector& pi) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (pi[i] < 0.0) {
      throw InvalidArgument("entropy of a vector with a negative entry");
    }
    if (pi[i] > 0.0) h -= pi[i] * std::log(pi[i]);
  }
  return h;
}

double RegularizedValue(const Matrix& q, const JointPolicy& policy,
                        double tau) {
  CheckShape(q, policy);
  return policy.mu.dot(q * policy.nu) + tau * Entropy(policy.mu) -
         tau * Entropy(policy.nu);
}

Vector Softmax(const Vector& z) {
  const double top = z.maxCoeff();
  Vector e = (z.array() - top).exp().matrix();
  return e / e.sum();
}

JointPolicy LogitResponse(const Matrix& q, const JointPolicy& policy,
                          double tau) {
  CheckTau(tau);
  CheckShape(q, policy);
  return {Softmax(q * policy.nu / tau),
          Softmax(-(q.transpose() * policy.mu) / tau)};
}

double FixedPointResidual(const Matrix& q, const JointPolicy& policy,
                          double tau) {
  const JointPolicy resp = LogitResponse(q, policy, tau);
  return std::max(SupDiff(policy.mu, resp.mu), SupDiff(policy.nu, resp.nu));
}

QreSolution SolveMatrixQre(const Matrix& q, double tau,
                           const SolverConfig& config,
                           const JointPolicy* warm_start) {
  config.Validate();
  CheckTau(tau);
  if (q.rows() < 1 || q.cols() < 1) throw InvalidArgument("empty payoff");
  if (!q.allFinite()) throw InvalidArgument("payoff has non-finite entries");

  QreSolution sol;
  sol.payoff = q;
  sol.policy = warm_start ? *warm_start
                          : JointPolicy::Uniform(static_cast<int>(q.rows()),
                                                 static_cast<int>(q.cols()));
  CheckShape(q, sol.policy);

  const double alpha = config.damping;
  double window_start = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= config.max_iter; ++it) {
    const JointPolicy resp = LogitResponse(q, sol.policy, tau);
    const double res = std::max(SupDiff(sol.policy.mu, resp.mu),
                                SupDiff(sol.policy.nu, resp.nu));
    sol.iterations = it;
    sol.residual = res;
    if (res <= config.tol) {
      sol.converged = true;
      return sol;
    }
    if (config.fallback && it % kStallWindow == 0) {
      if (res > 0.5 * window_start) break;
      window_start = res;
    }
    sol.policy.mu = (1.0 - alpha) * sol.policy.mu + alpha * resp.mu;
    sol.policy.nu = (1.0 - alpha) * sol.policy.nu + alpha * resp.nu;
  }

  if (config.fallback) {
    const JointPolicy start = sol.policy;
    NewtonOutcome newton = NewtonPolish(q, tau, start, config);
    const double res = FixedPointResidual(q, newton.policy, tau);
    sol.used_fallback = true;
    sol.iterations += newton.iterations;
    if (res < sol.residual) {
      sol.policy = std::move(newton.policy);
      sol.residual = res;
    }
  }
  sol.converged = sol.residual <= config.tol;
  return sol;
}

MarkovQreSolution PoliciesFromQTables(const StateTables& q, double tau,
                                      const SolverConfig& config) {
  CheckTau(tau);
  MarkovQreSolution out;
  out.v = Vector::Zero(static_cast<Eigen::Index>(q.size()));
  out.q = q;
  out.converged = true;
  for (std::size_t s = 0; s < q.size(); ++s) {
    QreSolution sol = SolveMatrixQre(q[s], tau, config);
    out.residual = std::max(out.residual, sol.residual);
    out.iterations = std::max(out.iterations, sol.iterations);
    out.v[static_cast<Eigen::Index>(s)] =
        RegularizedValue(q[s], sol.policy, tau);
    out.policies.push_back(std::move(sol.policy));
    if (!sol.converged) {
      out.converged = false;
      out.failed_state = static_cast<int>(s);
      return out;
    }
  }
  return out;
}

MarkovQreSolution ForwardSolveMarkov(const StateTables& reward,
                                     const TransitionTensor& transitions,
                                     double gamma, double tau,
                                     const SolverConfig& config,
                                     int max_sweeps) {
  config.Validate();
  CheckTau(tau);
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidArgument("discount must lie in [0, 1)");
  }
  const int num_states = transitions.num_states();
  if (static_cast<int>(reward.size()) != num_states) {
    throw InvalidArgument("reward table and transitions disagree on states");
  }
  if (transitions.StochasticityError() > 1e-9) {
    throw InvalidArgument("transition tensor is not stochastic");
  }
  for (const Matrix& r : reward) {
    if (r.rows() != transitions.rows() || r.cols() != transitions.cols()) {
      throw InvalidArgument("reward table shape does not match transitions");
    }
  }

  MarkovQreSolution out;
  out.v = Vector::Zero(num_states);
  out.q.assign(num_states, Matrix());
  out.policies.assign(num_states, JointPolicy::Uniform(transitions.rows(),
                                                       transitions.cols()));
  const double stop = config.tol * (1.0 - gamma);

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    Vector v_next(num_states);
    double worst = 0.0;
    for (int s = 0; s < num_states; ++s) {
      out.q[s] = reward[s];
      if (gamma > 0.0) out.q[s] += gamma * transitions.Expectation(s, out.v);
      QreSolution sol =
          SolveMatrixQre(out.q[s], tau, config, &out.policies[s]);
      if (!sol.converged) {
        out.failed_state = s;
        out.iterations = sweep;
        out.converged = false;
        return out;
      }
      worst = std::max(worst, sol.residual);
      out.policies[s] = std::move(sol.policy);
      v_next[s] = RegularizedValue(out.q[s], out.policies[s], tau);
    }
    const double delta = (v_next - out.v).cwiseAbs().maxCoeff();
    out.value_deltas.push_back(delta);
    out.v = std::move(v_next);
    out.residual = worst;
    out.iterations = sweep;
    if (gamma == 0.0 || delta <= stop) {
      out.converged = true;
      return out;
    }
  }
  out.converged = false;
  return out;
}

double TotalVariation(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw InvalidArgument("total variation of vectors of different length");
  }
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace qrinv
