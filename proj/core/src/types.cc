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

#include "qrinv/types.h"

#include <cmath>
#include <limits>
#include <sstream>

namespace qrinv {

void CheckSimplex(const Vector& v, double tol, const char* what) {
  if (v.size() == 0) throw InvalidArgument(std::string(what) + " is empty");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) {
      std::ostringstream os;
      os << what << "[" << i << "] = " << v[i] << " is negative";
      throw InvalidArgument(os.str());
    }
  }
  if (std::abs(v.sum() - 1.0) > tol) {
    std::ostringstream os;
    os << what << " sums to " << v.sum() << ", not 1";
    throw InvalidArgument(os.str());
  }
}

TransitionTensor::TransitionTensor(int num_states, int m, int n)
    : num_states_(num_states),
      m_(m),
      n_(n),
      values_(static_cast<std::size_t>(num_states) * m * n * num_states,
              0.0) {}

TransitionTensor::TransitionTensor(int num_states, int m, int n,
                                   std::vector<double> values)
    : num_states_(num_states), m_(m), n_(n), values_(std::move(values)) {
  if (values_.size() !=
      static_cast<std::size_t>(num_states) * m * n * num_states) {
    throw InvalidArgument("transition tensor has wrong number of entries");
  }
}

Matrix TransitionTensor::Expectation(int s, const Vector& v) const {
  if (v.size() != num_states_) {
    throw InvalidArgument("value vector length does not match state count");
  }
  Matrix out(m_, n_);
  for (int a = 0; a < m_; ++a) {
    for (int b = 0; b < n_; ++b) {
      auto row = Row(s, a, b);
      double acc = 0.0;
      for (int t = 0; t < num_states_; ++t) acc += row[t] * v[t];
      out(a, b) = acc;
    }
  }
  return out;
}

double TransitionTensor::StochasticityError() const {
  double worst = 0.0;
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < m_; ++a) {
      for (int b = 0; b < n_; ++b) {
        double total = 0.0;
        for (double p : Row(s, a, b)) {
          if (!(p >= 0.0)) return std::numeric_limits<double>::infinity();
          total += p;
        }
        worst = std::max(worst, std::abs(total - 1.0));
      }
    }
  }
  return worst;
}

}  // namespace qrinv
