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

// Reproducible random streams.
//
// Every random draw in the library comes from an Rng built for a named
// stream. A stream seed is derived from (master seed, key...) by chaining the
// SplitMix64 finalizer, so each (trial, purpose) pair gets its own
// independent engine and results do not depend on scheduling order.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. None of the <random> distributions are used because their
// algorithms are implementation-defined. Instead:
//   Uniform()         top 53 bits of one engine output, scaled to [0, 1).
//   StandardNormal()  Marsaglia polar method on Uniform(); the second
//                     variate of each accepted pair is cached.
//   Exponential()     -log(1 - Uniform()).
//   Categorical(cdf)  inverse-CDF lookup of one Uniform().
// Dirichlet(1, ..., 1) is sampled as normalized unit exponentials.

#ifndef QRINV_RNG_H_
#define QRINV_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace qrinv {

struct Seed {
  std::uint64_t value = 0;
};

// Purposes used when deriving trial streams.
enum class StreamPurpose : std::uint64_t {
  kGame = 1,
  kPlay = 2,
  kTransitions = 3,
  kConfidenceScan = 4,
};

std::uint64_t SplitMix64(std::uint64_t x);

// Chains SplitMix64 over the keys; distinct key tuples give unrelated seeds.
std::uint64_t DeriveSeed(Seed master, std::initializer_list<std::uint64_t> keys);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  explicit Rng(Seed seed) : engine_(seed.value) {}

  static Rng ForStream(Seed master, std::uint64_t trial, StreamPurpose purpose,
                       std::uint64_t sub = 0);

  std::uint64_t Next() { return engine_(); }
  double Uniform();
  double StandardNormal();
  double Exponential();
  int Categorical(std::span<const double> cdf);

  // Fills a vector with standard normals.
  std::vector<double> Normals(std::size_t count);
  // One draw from the flat Dirichlet over k outcomes.
  std::vector<double> FlatDirichlet(int k);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

// Cumulative sums of a probability vector; the last entry is forced to 1.
std::vector<double> CumulativeDistribution(std::span<const double> probs);

}  // namespace qrinv

#endif  // QRINV_RNG_H_
