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

#include "qrinv/sampling.h"

#include <sstream>
#include <string>

namespace qrinv {
namespace {

Vector FloorAndNormalize(const std::vector<std::int64_t>& counts,
                         std::int64_t total, double floor, bool* floored) {
  Vector p(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[static_cast<Eigen::Index>(i)] =
        static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  bool any = false;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0 && floor > 0.0) {
      p[i] = floor;
      any = true;
    }
  }
  if (any) p /= p.sum();
  *floored = *floored || any;
  return p;
}

std::vector<double> ToStd(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

MarkovDataset::MarkovDataset(int num_states, int m, int n)
    : num_states_(num_states),
      m_(m),
      n_(n),
      pairs_(static_cast<std::size_t>(num_states) * m * n, 0),
      transitions_(static_cast<std::size_t>(num_states) * m * n * num_states,
                   0) {}

void MarkovDataset::Record(int s, int a, int b, int next) {
  const std::size_t idx = PairIndex(s, a, b);
  ++pairs_[idx];
  ++transitions_[idx * num_states_ + next];
}

MatrixSample MarkovDataset::StateSample(int s) const {
  MatrixSample out;
  out.counts_a.assign(m_, 0);
  out.counts_b.assign(n_, 0);
  for (int a = 0; a < m_; ++a) {
    for (int b = 0; b < n_; ++b) {
      const std::int64_t c = pair_count(s, a, b);
      out.counts_a[a] += c;
      out.counts_b[b] += c;
      out.total += c;
    }
  }
  return out;
}

MatrixSample SampleMatrixPlay(const JointPolicy& policy, std::int64_t rounds,
                              Rng& rng) {
  if (rounds < 1) throw InvalidArgument("sample size must be >= 1");
  CheckSimplex(policy.mu, 1e-9, "mu");
  CheckSimplex(policy.nu, 1e-9, "nu");
  const std::vector<double> cdf_a = CumulativeDistribution(ToStd(policy.mu));
  const std::vector<double> cdf_b = CumulativeDistribution(ToStd(policy.nu));
  MatrixSample out;
  out.counts_a.assign(cdf_a.size(), 0);
  out.counts_b.assign(cdf_b.size(), 0);
  out.total = rounds;
  for (std::int64_t k = 0; k < rounds; ++k) {
    ++out.counts_a[rng.Categorical(cdf_a)];
    ++out.counts_b[rng.Categorical(cdf_b)];
  }
  return out;
}

MatrixSample SampleMatrixPlay(const JointPolicy& policy, std::int64_t rounds,
                              Seed seed) {
  Rng rng(seed);
  return SampleMatrixPlay(policy, rounds, rng);
}

EmpiricalPolicy EmpiricalPolicies(const MatrixSample& sample,
                                  std::optional<double> floor) {
  if (sample.total < 1) throw InvalidArgument("empty sample");
  const double f = floor.value_or(0.5 / static_cast<double>(sample.total));
  if (!(f >= 0.0)) throw InvalidArgument("floor must be non-negative");
  EmpiricalPolicy out;
  out.policy.mu = FloorAndNormalize(sample.counts_a, sample.total, f,
                                    &out.floored);
  out.policy.nu = FloorAndNormalize(sample.counts_b, sample.total, f,
                                    &out.floored);
  return out;
}

MarkovDataset SampleMarkovDataset(const TransitionTensor& transitions,
                                  const std::vector<JointPolicy>& policies,
                                  std::int64_t per_state, Rng& rng) {
  if (per_state < 1) throw InvalidArgument("per-state sample size must be >= 1");
  const int num_states = transitions.num_states();
  if (static_cast<int>(policies.size()) != num_states) {
    throw InvalidArgument("need one policy per state");
  }
  const int m = transitions.rows();
  const int n = transitions.cols();
  std::vector<std::vector<double>> next_cdf;
  next_cdf.reserve(static_cast<std::size_t>(num_states) * m * n);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < n; ++b) {
        next_cdf.push_back(CumulativeDistribution(transitions.Row(s, a, b)));
      }
    }
  }

  MarkovDataset data(num_states, m, n);
  data.set_per_state(per_state);
  for (int s = 0; s < num_states; ++s) {
    const JointPolicy& pol = policies[s];
    if (pol.mu.size() != m || pol.nu.size() != n) {
      throw InvalidArgument("policy shape mismatch at state " +
                            std::to_string(s));
    }
    const std::vector<double> cdf_a = CumulativeDistribution(ToStd(pol.mu));
    const std::vector<double> cdf_b = CumulativeDistribution(ToStd(pol.nu));
    for (std::int64_t k = 0; k < per_state; ++k) {
      const int a = rng.Categorical(cdf_a);
      const int b = rng.Categorical(cdf_b);
      const int next = rng.Categorical(
          next_cdf[(static_cast<std::size_t>(s) * m + a) * n + b]);
      data.Record(s, a, b, next);
    }
  }
  return data;
}

MarkovDataset SampleMarkovDataset(const MarkovGameSpec& game,
                                  const std::vector<JointPolicy>& policies,
                                  std::int64_t per_state, Seed seed) {
  Rng rng(seed);
  return SampleMarkovDataset(game.transitions, policies, per_state, rng);
}

std::vector<EmpiricalPolicy> EmpiricalStatePolicies(
    const MarkovDataset& data, std::optional<double> floor) {
  std::vector<EmpiricalPolicy> out;
  out.reserve(data.num_states());
  for (int s = 0; s < data.num_states(); ++s) {
    out.push_back(EmpiricalPolicies(data.StateSample(s), floor));
  }
  return out;
}

TransitionTensor EstimateTransitions(const MarkovDataset& data,
                                     double alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be non-negative");
  const int num_states = data.num_states();
  TransitionTensor out(num_states, data.rows(), data.cols());
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < data.rows(); ++a) {
      for (int b = 0; b < data.cols(); ++b) {
        const double visits = static_cast<double>(data.pair_count(s, a, b));
        const double denom = visits + alpha * num_states;
        if (!(denom > 0.0)) {
          std::ostringstream os;
          os << "transition (" << s << "," << a << "," << b
             << ") never visited and alpha = 0";
          throw InvalidArgument(os.str());
        }
        auto row = out.MutableRow(s, a, b);
        for (int t = 0; t < num_states; ++t) {
          row[t] = (static_cast<double>(data.transition_count(s, a, b, t)) +
                    alpha) /
                   denom;
        }
      }
    }
  }
  return out;
}

}  // namespace qrinv
