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

#ifndef QRINV_SAMPLING_H_
#define QRINV_SAMPLING_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "qrinv/game_models.h"
#include "qrinv/rng.h"
#include "qrinv/types.h"

namespace qrinv {

// Action counts from N rounds of independent play.
struct MatrixSample {
  std::vector<std::int64_t> counts_a;
  std::vector<std::int64_t> counts_b;
  std::int64_t total = 0;
};

struct EmpiricalPolicy {
  JointPolicy policy;
  // True when at least one zero count was replaced by the floor.
  bool floored = false;
};

// Generative-model data: at every state, N (a, b) pairs drawn from the
// product policy and one next state per pair.
class MarkovDataset {
 public:
  MarkovDataset() = default;
  MarkovDataset(int num_states, int m, int n);

  int num_states() const { return num_states_; }
  int rows() const { return m_; }
  int cols() const { return n_; }
  std::int64_t per_state() const { return per_state_; }
  std::int64_t total() const { return per_state_ * num_states_; }

  std::int64_t pair_count(int s, int a, int b) const {
    return pairs_[PairIndex(s, a, b)];
  }
  std::int64_t transition_count(int s, int a, int b, int next) const {
    return transitions_[PairIndex(s, a, b) * num_states_ + next];
  }

  void Record(int s, int a, int b, int next);
  void set_per_state(std::int64_t n) { per_state_ = n; }

  // Marginal action counts of one state.
  MatrixSample StateSample(int s) const;

  const std::vector<std::int64_t>& pair_counts() const { return pairs_; }
  const std::vector<std::int64_t>& transition_counts() const {
    return transitions_;
  }

 private:
  std::size_t PairIndex(int s, int a, int b) const {
    return (static_cast<std::size_t>(s) * m_ + a) * n_ + b;
  }

  int num_states_ = 0;
  int m_ = 0;
  int n_ = 0;
  std::int64_t per_state_ = 0;
  std::vector<std::int64_t> pairs_;        // (s, a, b)
  std::vector<std::int64_t> transitions_;  // (s, a, b, s')
};

MatrixSample SampleMatrixPlay(const JointPolicy& policy, std::int64_t rounds,
                              Rng& rng);
MatrixSample SampleMatrixPlay(const JointPolicy& policy, std::int64_t rounds,
                              Seed seed);

// Frequencies; zero entries are raised to floor (default 1 / (2N)) and the
// vector renormalized.
EmpiricalPolicy EmpiricalPolicies(const MatrixSample& sample,
                                  std::optional<double> floor = std::nullopt);

MarkovDataset SampleMarkovDataset(const TransitionTensor& transitions,
                                  const std::vector<JointPolicy>& policies,
                                  std::int64_t per_state, Rng& rng);
MarkovDataset SampleMarkovDataset(const MarkovGameSpec& game,
                                  const std::vector<JointPolicy>& policies,
                                  std::int64_t per_state, Seed seed);

std::vector<EmpiricalPolicy> EmpiricalStatePolicies(
    const MarkovDataset& data, std::optional<double> floor = std::nullopt);

// P(s'|s,a,b) = (count + alpha) / (visits + alpha S).
TransitionTensor EstimateTransitions(const MarkovDataset& data,
                                     double alpha = 1.0);

}  // namespace qrinv

#endif  // QRINV_SAMPLING_H_
