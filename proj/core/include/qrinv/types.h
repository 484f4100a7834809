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

#ifndef QRINV_TYPES_H_
#define QRINV_TYPES_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrinv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Per-state m x n tables (Q, r, counts as doubles).
using StateTables = std::vector<Matrix>;

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { kUsage = 2, kNumerical = 3, kIo = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad arguments: dimension mismatches, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kUsage, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

// Raised when the observed play is uniform (log-ratio vector is zero), so the
// scale of theta cannot be recovered.
class NonUniformityViolation : public NumericalError {
 public:
  explicit NonUniformityViolation(const std::string& what)
      : NumericalError(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

// Mixed strategies of the maximizing (mu, length m) and minimizing
// (nu, length n) player.
struct JointPolicy {
  Vector mu;
  Vector nu;

  static JointPolicy Uniform(int m, int n) {
    return {Vector::Constant(m, 1.0 / m), Vector::Constant(n, 1.0 / n)};
  }
};

// Checks that v is a probability vector within tol. Throws InvalidArgument.
void CheckSimplex(const Vector& v, double tol, const char* what);

// Transition kernel P(s' | s, a, b), stored densely with s' fastest.
class TransitionTensor {
 public:
  TransitionTensor() = default;
  TransitionTensor(int num_states, int m, int n);
  TransitionTensor(int num_states, int m, int n, std::vector<double> values);

  int num_states() const { return num_states_; }
  int rows() const { return m_; }
  int cols() const { return n_; }

  std::span<const double> Row(int s, int a, int b) const {
    return {values_.data() + Offset(s, a, b),
            static_cast<std::size_t>(num_states_)};
  }
  std::span<double> MutableRow(int s, int a, int b) {
    return {values_.data() + Offset(s, a, b),
            static_cast<std::size_t>(num_states_)};
  }
  double operator()(int s, int a, int b, int next) const {
    return values_[Offset(s, a, b) + next];
  }

  // E_{s'~P(.|s,a,b)}[v(s')] for every (a, b) at state s.
  Matrix Expectation(int s, const Vector& v) const;

  // Max over rows of |sum - 1|, or +inf if any entry is negative.
  double StochasticityError() const;

  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t Offset(int s, int a, int b) const {
    return ((static_cast<std::size_t>(s) * m_ + a) * n_ + b) * num_states_;
  }

  int num_states_ = 0;
  int m_ = 0;
  int n_ = 0;
  std::vector<double> values_;
};

}  // namespace qrinv

#endif  // QRINV_TYPES_H_
