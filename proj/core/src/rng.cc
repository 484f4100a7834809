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

#include "qrinv/rng.h"

#include <algorithm>
#include <cmath>

namespace qrinv {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(Seed master,
                         std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = SplitMix64(master.value);
  for (std::uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k));
  return h;
}

Rng Rng::ForStream(Seed master, std::uint64_t trial, StreamPurpose purpose,
                   std::uint64_t sub) {
  return Rng(DeriveSeed(master,
                        {trial, static_cast<std::uint64_t>(purpose), sub}));
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::StandardNormal() {
  if (spare_normal_) {
    double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u, v, s;
  do {
    u = 2.0 * Uniform() - 1.0;
    v = 2.0 * Uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  return u * f;
}

double Rng::Exponential() { return -std::log1p(-Uniform()); }

int Rng::Categorical(std::span<const double> cdf) {
  double u = Uniform();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<int>(it - cdf.begin());
}

std::vector<double> Rng::Normals(std::size_t count) {
  std::vector<double> out(count);
  for (double& z : out) z = StandardNormal();
  return out;
}

std::vector<double> Rng::FlatDirichlet(int k) {
  std::vector<double> out(k);
  double total = 0.0;
  for (double& x : out) {
    x = Exponential();
    total += x;
  }
  for (double& x : out) x /= total;
  return out;
}

std::vector<double> CumulativeDistribution(std::span<const double> probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

}  // namespace qrinv
