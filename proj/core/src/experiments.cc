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

#include "qrinv/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "qrinv/estimators.h"
#include "qrinv/game_models.h"
#include "qrinv/sampling.h"
#include "qrinv/serialization.h"
#include "qrinv/system_builder.h"

namespace qrinv {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Fn>
void ParallelFor(int count, int jobs, Fn&& fn) {
  int workers = jobs > 0
                    ? jobs
                    : static_cast<int>(
                          std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Runs body(trial) for every trial and concatenates records in trial order.
// Library errors inside a trial are turned into failed records for every
// (group, x) listed in skeleton.
template <typename Body>
std::vector<TrialRecord> RunTrials(
    const ExperimentConfig& config, std::size_t num_metrics,
    const std::vector<std::pair<std::string, double>>& skeleton, Body&& body) {
  std::vector<std::vector<TrialRecord>> per_trial(config.trials);
  ParallelFor(config.trials, config.jobs, [&](int trial) {
    try {
      per_trial[trial] = body(trial);
    } catch (const Error& e) {
      std::vector<TrialRecord> failed;
      for (const auto& [group, x] : skeleton) {
        TrialRecord rec;
        rec.trial = trial;
        rec.group = group;
        rec.x = x;
        rec.values.assign(num_metrics, kNaN);
        rec.ok = false;
        rec.error = e.what();
        failed.push_back(std::move(rec));
      }
      per_trial[trial] = std::move(failed);
    }
  });
  std::vector<TrialRecord> out;
  for (auto& recs : per_trial) {
    for (auto& r : recs) out.push_back(std::move(r));
  }
  return out;
}

TrialRecord Record(int trial, std::string group, double x,
                   std::vector<double> values, bool floored = false) {
  TrialRecord rec;
  rec.trial = trial;
  rec.group = std::move(group);
  rec.x = x;
  rec.values = std::move(values);
  rec.floored = floored;
  return rec;
}

TrialRecord FailedRecord(int trial, std::string group, double x,
                         std::size_t num_metrics, const std::string& what) {
  TrialRecord rec = Record(trial, std::move(group), x,
                           std::vector<double>(num_metrics, kNaN));
  rec.ok = false;
  rec.error = what;
  return rec;
}

std::uint64_t GameStream(const ExperimentConfig& config, int trial) {
  return config.fixed_game ? 0 : static_cast<std::uint64_t>(trial);
}

struct MatrixTrial {
  MatrixGameSpec game;
  QreSolution qre;
};

MatrixTrial SetupMatrixTrial(const ExperimentConfig& config, int trial) {
  Rng rng = Rng::ForStream(Seed{config.seed}, GameStream(config, trial),
                           StreamPurpose::kGame);
  MatrixTrial t;
  t.game = GenerateMatrixGame(config.m, config.n, config.d, config.tau_star,
                              config.norm, rng);
  t.qre = SolveMatrixQre(t.game.Payoff(), config.tau_star, config.solver);
  if (!t.qre.converged) {
    throw NumericalError("QRE solve did not converge, residual " +
                         FormatDouble(t.qre.residual));
  }
  return t;
}

EmpiricalPolicy ObservePlay(const ExperimentConfig& config,
                            const JointPolicy& policy, std::int64_t rounds,
                            int trial, std::size_t grid_index) {
  Rng rng = Rng::ForStream(Seed{config.seed}, static_cast<std::uint64_t>(trial),
                           StreamPurpose::kPlay, grid_index);
  return EmpiricalPolicies(SampleMatrixPlay(policy, rounds, rng), config.floor);
}

std::vector<std::pair<std::string, double>> Skeleton(
    const std::vector<std::string>& groups, const std::vector<double>& xs) {
  std::vector<std::pair<std::string, double>> out;
  for (double x : xs) {
    for (const auto& g : groups) out.emplace_back(g, x);
  }
  return out;
}

std::vector<double> GridAsDoubles(const ExperimentConfig& config) {
  return std::vector<double>(config.grid.begin(), config.grid.end());
}

double CosineDistance(const Vector& a, const Vector& b) {
  return 1.0 - a.dot(b) / (a.norm() * b.norm());
}

double MaxAbs(const StateTables& a, const StateTables& b) {
  double worst = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    worst = std::max(worst, (a[s] - b[s]).cwiseAbs().maxCoeff());
  }
  return worst;
}

double PolicyTv(const JointPolicy& a, const JointPolicy& b) {
  return std::max(TotalVariation(a.mu, b.mu), TotalVariation(a.nu, b.nu));
}

std::string TauLabel(double tau) { return "known-tau=" + FormatDouble(tau); }

ExperimentResult Finish(std::string name, const ExperimentConfig& config,
                        std::vector<std::string> metrics,
                        std::vector<TrialRecord> raw, bool fit_slopes = true) {
  ExperimentResult result;
  result.name = std::move(name);
  result.config = config;
  result.metrics = std::move(metrics);
  result.raw = std::move(raw);
  result.fit_slopes = fit_slopes;
  std::map<int, bool> failed_trials;
  for (const auto& r : result.raw) {
    if (!r.ok) failed_trials[r.trial] = true;
  }
  result.failures = static_cast<int>(failed_trials.size());
  result.series = Summarize(result);
  return result;
}

std::string CsvQuote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string CsvPreamble(const ExperimentResult& result) {
  std::ostringstream os;
  os << "# tool=qrinv version=" << QRINV_VERSION << "\n";
  os << "# experiment=" << result.name << " seed=" << result.config.seed
     << "\n";
  os << "# config=" << ToJson(result.config).dump() << "\n";
  return os.str();
}

}  // namespace

const char* ExperimentName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergenceMatrix:
      return "convergence-matrix";
    case ExperimentKind::kComparisonTable:
      return "comparison-table";
    case ExperimentKind::kMisspecifiedC:
      return "misspecified-c";
    case ExperimentKind::kConvergenceMarkov:
      return "convergence-markov";
    case ExperimentKind::kUnknownDynamics:
      return "unknown-dynamics";
    case ExperimentKind::kFeatureMisspecification:
      return "feature-misspecification";
    case ExperimentKind::kCoverage:
      return "coverage";
  }
  return "unknown";
}

std::vector<ExperimentKind> AllExperimentKinds() {
  return {ExperimentKind::kConvergenceMatrix,
          ExperimentKind::kComparisonTable,
          ExperimentKind::kMisspecifiedC,
          ExperimentKind::kConvergenceMarkov,
          ExperimentKind::kUnknownDynamics,
          ExperimentKind::kFeatureMisspecification,
          ExperimentKind::kCoverage};
}

ExperimentKind ParseExperimentKind(const std::string& name) {
  for (ExperimentKind k : AllExperimentKinds()) {
    if (name == ExperimentName(k)) return k;
  }
  throw InvalidArgument("unknown experiment '" + name + "'");
}

std::vector<std::int64_t> LogGrid(std::int64_t lo, std::int64_t hi, int n) {
  if (n < 1 || lo < 1 || hi < lo) throw InvalidArgument("invalid log grid");
  if (n == 1) return {lo};
  std::vector<std::int64_t> out;
  const double step = std::log(static_cast<double>(hi) / lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    out.push_back(static_cast<std::int64_t>(
        std::llround(static_cast<double>(lo) * std::exp(step * i))));
  }
  out.back() = hi;
  return out;
}

ExperimentConfig DefaultExperimentConfig(ExperimentKind kind) {
  ExperimentConfig c;
  c.name = ExperimentName(kind);
  switch (kind) {
    case ExperimentKind::kConvergenceMatrix:
      c.grid = LogGrid(1000, 100000, 6);
      break;
    case ExperimentKind::kComparisonTable:
      c.grid = {10000};
      c.tau_assumed = {1.0, 2.0, 4.0};
      break;
    case ExperimentKind::kMisspecifiedC:
      c.m = c.n = 20;
      c.d = 8;
      c.norm = 5.0;
      c.grid = {100000};
      c.c_ratios = {0.1, 0.3, 1.0, 3.0, 10.0};
      break;
    case ExperimentKind::kConvergenceMarkov:
    case ExperimentKind::kUnknownDynamics:
      c.m = c.n = 5;
      c.d = 6;
      c.num_states = 8;
      c.tau_star = 1.5;
      c.norm = 1.0;
      c.gamma = 0.9;
      for (std::int64_t per_state : LogGrid(250, 25000, 6)) {
        c.grid.push_back(per_state * c.num_states);
      }
      break;
    case ExperimentKind::kFeatureMisspecification:
      c.grid = LogGrid(1000, 100000, 6);
      c.d_est = 4;
      break;
    case ExperimentKind::kCoverage:
      c.grid = {10000};
      c.trials = 200;
      c.delta = 0.05;
      break;
  }
  return c;
}

void ExperimentConfig::Validate() const {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (grid.empty()) throw InvalidArgument("sample-size grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw InvalidArgument("grid values must be positive");
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw InvalidArgument("grid must be strictly increasing");
    }
  }
  if (m < 2 || n < 2 || d < 1) throw InvalidArgument("invalid game dimensions");
  if (num_states < 1) throw InvalidArgument("num_states must be >= 1");
  if (!(tau_star > 0.0)) throw InvalidArgument("tau_star must be positive");
  if (!(norm > 0.0)) throw InvalidArgument("norm must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidArgument("gamma must lie in [0, 1)");
  }
  if (floor && !(*floor >= 0.0)) throw InvalidArgument("floor must be >= 0");
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  if (d_est < 1 || d_est > d) throw InvalidArgument("d_est must lie in [1, d]");
  if (jobs < 0) throw InvalidArgument("jobs must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  for (double r : c_ratios) {
    if (!(r > 0.0)) throw InvalidArgument("C ratios must be positive");
  }
  for (double t : tau_assumed) {
    if (!(t > 0.0)) throw InvalidArgument("assumed temperatures must be positive");
  }
  solver.Validate();
}

const SeriesSummary& ExperimentResult::Series(const std::string& group,
                                              const std::string& metric) const {
  for (const auto& s : series) {
    if (s.group == group && s.metric == metric) return s;
  }
  throw InvalidArgument("no series " + group + "/" + metric + " in " + name);
}

ConvergenceReport RunConvergenceMatrix(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<std::string> metrics = {"theta_error", "tau_error"};
  auto raw = RunTrials(
      config, metrics.size(), Skeleton({"nls"}, GridAsDoubles(config)),
      [&](int trial) {
        const MatrixTrial t = SetupMatrixTrial(config, trial);
        std::vector<TrialRecord> recs;
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
          const double x = static_cast<double>(config.grid[g]);
          try {
            const EmpiricalPolicy emp =
                ObservePlay(config, t.qre.policy, config.grid[g], trial, g);
            const EstimationResult est = NlsEstimate(
                BuildSystem(t.game.features, emp.policy), config.norm);
            recs.push_back(Record(
                trial, "nls", x,
                {(est.theta_hat - t.game.theta_star).norm(),
                 std::abs(est.tau_hat - t.game.tau_star)},
                emp.floored));
          } catch (const Error& e) {
            recs.push_back(FailedRecord(trial, "nls", x, metrics.size(), e.what()));
          }
        }
        return recs;
      });
  return Finish(config.name.empty() ? "convergence-matrix" : config.name,
                config, metrics, std::move(raw));
}

ExperimentResult RunComparisonTable(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<std::string> metrics = {"theta_error"};
  std::vector<std::string> groups = {"nls"};
  for (double tau : config.tau_assumed) groups.push_back(TauLabel(tau));
  auto raw = RunTrials(
      config, metrics.size(), Skeleton(groups, GridAsDoubles(config)),
      [&](int trial) {
        const MatrixTrial t = SetupMatrixTrial(config, trial);
        std::vector<TrialRecord> recs;
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
          const double x = static_cast<double>(config.grid[g]);
          try {
            const EmpiricalPolicy emp =
                ObservePlay(config, t.qre.policy, config.grid[g], trial, g);
            const LinearSystem sys = BuildSystem(t.game.features, emp.policy);
            const EstimationResult est = NlsEstimate(sys, config.norm);
            recs.push_back(Record(trial, "nls", x,
                                  {(est.theta_hat - t.game.theta_star).norm()},
                                  emp.floored));
            for (double tau : config.tau_assumed) {
              const Vector theta = StandardIgtEstimate(sys, tau);
              recs.push_back(Record(trial, TauLabel(tau), x,
                                    {(theta - t.game.theta_star).norm()},
                                    emp.floored));
            }
          } catch (const Error& e) {
            for (const auto& grp : groups) {
              recs.push_back(FailedRecord(trial, grp, x, metrics.size(), e.what()));
            }
          }
        }
        return recs;
      });
  return Finish(config.name.empty() ? "comparison-table" : config.name, config,
                metrics, std::move(raw));
}

ExperimentResult RunMisspecifiedC(const ExperimentConfig& config) {
  config.Validate();
  if (config.c_ratios.empty()) throw InvalidArgument("no C ratios given");
  const std::vector<std::string> metrics = {
      "directional_error", "tau_ratio", "tau_ratio_normalized"};
  std::vector<std::string> groups;
  for (std::int64_t big_n : config.grid) {
    groups.push_back("N=" + std::to_string(big_n));
  }
  std::vector<std::pair<std::string, double>> skeleton;
  for (const auto& g : groups) {
    for (double r : config.c_ratios) skeleton.emplace_back(g, r);
  }
  auto raw = RunTrials(config, metrics.size(), skeleton, [&](int trial) {
    const MatrixTrial t = SetupMatrixTrial(config, trial);
    std::vector<TrialRecord> recs;
    for (std::size_t g = 0; g < config.grid.size(); ++g) {
      try {
        const EmpiricalPolicy emp =
            ObservePlay(config, t.qre.policy, config.grid[g], trial, g);
        const LinearSystem sys = BuildSystem(t.game.features, emp.policy);
        for (double ratio : config.c_ratios) {
          const EstimationResult est = NlsEstimate(sys, ratio * config.norm);
          const double tau_ratio = est.tau_hat / t.game.tau_star;
          recs.push_back(Record(
              trial, groups[g], ratio,
              {CosineDistance(est.theta_hat, t.game.theta_star), tau_ratio,
               tau_ratio / ratio},
              emp.floored));
        }
      } catch (const Error& e) {
        for (double ratio : config.c_ratios) {
          recs.push_back(
              FailedRecord(trial, groups[g], ratio, metrics.size(), e.what()));
        }
      }
    }
    return recs;
  });
  return Finish(config.name.empty() ? "misspecified-c" : config.name, config,
                metrics, std::move(raw), /*fit_slopes=*/false);
}

namespace {

struct MarkovObservation {
  std::vector<JointPolicy> policies;
  bool floored = false;
  MarkovDataset data;
};

MarkovObservation ObserveMarkov(const ExperimentConfig& config,
                                const MarkovGameSpec& game, std::int64_t k,
                                int trial, std::size_t grid_index) {
  const std::int64_t per_state = k / game.num_states();
  if (per_state < 1) {
    throw InvalidArgument("K must be at least the number of states");
  }
  Rng rng = Rng::ForStream(Seed{config.seed}, static_cast<std::uint64_t>(trial),
                           StreamPurpose::kPlay, grid_index);
  MarkovObservation obs;
  obs.data = SampleMarkovDataset(game.transitions, game.equilibrium.policies,
                                 per_state, rng);
  for (auto& emp : EmpiricalStatePolicies(obs.data, config.floor)) {
    obs.floored = obs.floored || emp.floored;
    obs.policies.push_back(std::move(emp.policy));
  }
  return obs;
}

MarkovGameSpec SetupMarkovTrial(const ExperimentConfig& config, int trial) {
  Rng rng = Rng::ForStream(Seed{config.seed}, GameStream(config, trial),
                           StreamPurpose::kGame);
  return GenerateMarkovGame(config.num_states, config.m, config.n, config.d,
                            config.tau_star, config.norm, config.gamma, rng,
                            config.solver);
}

}  // namespace

ConvergenceReport RunConvergenceMarkov(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<std::string> metrics = {"theta_error", "tau_error",
                                            "reward_error", "roundtrip_tv"};
  auto raw = RunTrials(
      config, metrics.size(), Skeleton({"known-p"}, GridAsDoubles(config)),
      [&](int trial) {
        const MarkovGameSpec game = SetupMarkovTrial(config, trial);
        std::vector<TrialRecord> recs;
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
          const double x = static_cast<double>(config.grid[g]);
          try {
            const MarkovObservation obs =
                ObserveMarkov(config, game, config.grid[g], trial, g);
            const LinearSystem sys =
                BuildMarkovSystem(game.features, obs.policies);
            const MarkovRecovery rec = RecoverMarkovRewards(
                sys, config.norm, game.features, obs.policies,
                game.transitions, config.gamma, DynamicsMode::kKnownP);
            const MarkovQreSolution replay = ForwardSolveMarkov(
                rec.r_hat, game.transitions, config.gamma, rec.tau_hat());
            double tv = kNaN;
            if (replay.converged) {
              tv = 0.0;
              for (int s = 0; s < game.num_states(); ++s) {
                tv = std::max(tv, PolicyTv(replay.policies[s],
                                           game.equilibrium.policies[s]));
              }
            }
            recs.push_back(Record(
                trial, "known-p", x,
                {(rec.theta_hat() - game.theta_star).norm(),
                 std::abs(rec.tau_hat() - game.tau_star),
                 MaxAbs(rec.r_hat, game.reward), tv},
                obs.floored));
          } catch (const Error& e) {
            recs.push_back(
                FailedRecord(trial, "known-p", x, metrics.size(), e.what()));
          }
        }
        return recs;
      });
  return Finish(config.name.empty() ? "convergence-markov" : config.name,
                config, metrics, std::move(raw));
}

ConvergenceReport RunUnknownDynamics(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<std::string> metrics = {"reward_error", "theta_error",
                                            "tau_error"};
  const std::vector<std::string> groups = {"known-p", "estimated-p"};
  auto raw = RunTrials(
      config, metrics.size(), Skeleton(groups, GridAsDoubles(config)),
      [&](int trial) {
        const MarkovGameSpec game = SetupMarkovTrial(config, trial);
        std::vector<TrialRecord> recs;
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
          const double x = static_cast<double>(config.grid[g]);
          try {
            const MarkovObservation obs =
                ObserveMarkov(config, game, config.grid[g], trial, g);
            const EstimationResult est = NlsEstimate(
                BuildMarkovSystem(game.features, obs.policies), config.norm);
            const TransitionTensor p_hat =
                EstimateTransitions(obs.data, config.alpha);
            const double theta_err = (est.theta_hat - game.theta_star).norm();
            const double tau_err = std::abs(est.tau_hat - game.tau_star);
            const MarkovRecovery known =
                RecoverMarkovRewards(est, game.features, obs.policies,
                                     game.transitions, config.gamma,
                                     DynamicsMode::kKnownP);
            const MarkovRecovery estimated = RecoverMarkovRewards(
                est, game.features, obs.policies, p_hat, config.gamma,
                DynamicsMode::kEstimatedP);
            recs.push_back(Record(trial, "known-p", x,
                                  {MaxAbs(known.r_hat, game.reward),
                                   theta_err, tau_err},
                                  obs.floored));
            recs.push_back(Record(trial, "estimated-p", x,
                                  {MaxAbs(estimated.r_hat, game.reward),
                                   theta_err, tau_err},
                                  obs.floored));
          } catch (const Error& e) {
            for (const auto& grp : groups) {
              recs.push_back(FailedRecord(trial, grp, x, metrics.size(), e.what()));
            }
          }
        }
        return recs;
      });
  return Finish(config.name.empty() ? "unknown-dynamics" : config.name, config,
                metrics, std::move(raw));
}

Vector ProjectPayoffOntoFeatures(const FeatureMap& features, const Matrix& q) {
  if (features.num_states() != 1 || q.rows() != features.rows() ||
      q.cols() != features.cols()) {
    throw InvalidArgument("payoff shape does not match features");
  }
  Vector target(q.size());
  Eigen::Index i = 0;
  for (int a = 0; a < q.rows(); ++a) {
    for (int b = 0; b < q.cols(); ++b) target[i++] = q(a, b);
  }
  return features.DesignMatrix().colPivHouseholderQr().solve(target);
}

ExperimentResult RunFeatureMisspecification(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<std::string> metrics = {"directional_error",
                                            "behavioral_error"};
  std::vector<int> dims(config.d_est);
  for (int k = 0; k < config.d_est; ++k) dims[k] = k;
  auto raw = RunTrials(
      config, metrics.size(), Skeleton({"nls"}, GridAsDoubles(config)),
      [&](int trial) {
        const MatrixTrial t = SetupMatrixTrial(config, trial);
        const FeatureMap est_features = t.game.features.SelectDims(dims);
        const Vector target =
            ProjectPayoffOntoFeatures(est_features, t.game.Payoff());
        std::vector<TrialRecord> recs;
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
          const double x = static_cast<double>(config.grid[g]);
          try {
            const EmpiricalPolicy emp =
                ObservePlay(config, t.qre.policy, config.grid[g], trial, g);
            const EstimationResult est = NlsEstimate(
                BuildSystem(est_features, emp.policy), config.norm);
            const QreSolution induced = SolveMatrixQre(
                BuildPayoffMatrix(est_features, est.theta_hat), est.tau_hat,
                config.solver);
            if (!induced.converged) {
              throw NumericalError("induced QRE did not converge");
            }
            recs.push_back(Record(
                trial, "nls", x,
                {CosineDistance(est.theta_hat, target),
                 PolicyTv(induced.policy, t.qre.policy)},
                emp.floored));
          } catch (const Error& e) {
            recs.push_back(FailedRecord(trial, "nls", x, metrics.size(), e.what()));
          }
        }
        return recs;
      });
  return Finish(config.name.empty() ? "feature-misspecification" : config.name,
                config, metrics, std::move(raw));
}

ExperimentResult RunCoverage(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<std::string> metrics = {"contained", "kappa", "residual_sq",
                                            "contained_plugin"};
  auto raw = RunTrials(
      config, metrics.size(), Skeleton({"true-constants"}, GridAsDoubles(config)),
      [&](int trial) {
        const MatrixTrial t = SetupMatrixTrial(config, trial);
        ConfidenceConfig cc;
        cc.delta = config.delta;
        cc.xi = std::min(t.qre.policy.mu.minCoeff(), t.qre.policy.nu.minCoeff());
        cc.feature_bound = t.game.features.bound();
        cc.norm_c = config.norm;
        cc.tau_max = config.tau_max.value_or(config.tau_star);
        cc.m = config.m;
        cc.n = config.n;
        std::vector<TrialRecord> recs;
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
          const double x = static_cast<double>(config.grid[g]);
          try {
            const EmpiricalPolicy emp =
                ObservePlay(config, t.qre.policy, config.grid[g], trial, g);
            const LinearSystem sys = BuildSystem(t.game.features, emp.policy);
            cc.samples = config.grid[g];
            const double kappa = ConfidenceThreshold(cc);
            ConfidenceConfig plug = cc;
            const JointPolicy observed[] = {emp.policy};
            plug.xi = PlugInSoftMinGap(observed);
            const double kappa_plugin = ConfidenceThreshold(plug);
            const double r =
                BilinearResidual(sys, t.game.theta_star, t.game.tau_star);
            recs.push_back(Record(
                trial, "true-constants", x,
                {ConfidenceContains(sys, t.game.theta_star, t.game.tau_star,
                                    kappa, config.norm)
                     ? 1.0
                     : 0.0,
                 kappa, r * r,
                 ConfidenceContains(sys, t.game.theta_star, t.game.tau_star,
                                    kappa_plugin, config.norm)
                     ? 1.0
                     : 0.0},
                emp.floored));
          } catch (const Error& e) {
            recs.push_back(FailedRecord(trial, "true-constants", x,
                                        metrics.size(), e.what()));
          }
        }
        return recs;
      });
  return Finish(config.name.empty() ? "coverage" : config.name, config,
                metrics, std::move(raw), /*fit_slopes=*/false);
}

ExperimentResult RunExperiment(ExperimentKind kind,
                               const ExperimentConfig& config) {
  switch (kind) {
    case ExperimentKind::kConvergenceMatrix:
      return RunConvergenceMatrix(config);
    case ExperimentKind::kComparisonTable:
      return RunComparisonTable(config);
    case ExperimentKind::kMisspecifiedC:
      return RunMisspecifiedC(config);
    case ExperimentKind::kConvergenceMarkov:
      return RunConvergenceMarkov(config);
    case ExperimentKind::kUnknownDynamics:
      return RunUnknownDynamics(config);
    case ExperimentKind::kFeatureMisspecification:
      return RunFeatureMisspecification(config);
    case ExperimentKind::kCoverage:
      return RunCoverage(config);
  }
  throw InvalidArgument("unknown experiment kind");
}

std::vector<ComparisonRow> ComparisonTable(const ExperimentResult& result) {
  std::vector<ComparisonRow> rows;
  for (const auto& s : result.series) {
    if (s.metric != "theta_error" || s.mean.empty()) continue;
    ComparisonRow row;
    if (s.group == "nls") {
      row.method = "nls";
      row.tau = "estimated";
    } else {
      row.method = "known-tau";
      row.tau = s.group.substr(s.group.find('=') + 1);
    }
    row.mean_error = s.mean.front();
    row.stddev = s.stddev.front();
    row.stderr_ = s.stderr_.front();
    rows.push_back(row);
  }
  return rows;
}

double FitLogLogSlope(std::span<const double> sizes,
                      std::span<const double> errors) {
  if (sizes.size() != errors.size() || sizes.size() < 2) {
    throw InvalidArgument("slope fit needs at least two paired points");
  }
  const std::size_t k = sizes.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(sizes[i] > 0.0) || !(errors[i] > 0.0)) {
      throw InvalidArgument("slope fit needs positive sizes and errors");
    }
    lx[i] = std::log(sizes[i]);
    ly[i] = std::log(errors[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("slope fit needs distinct sizes");
  return sxy / sxx;
}

std::vector<SeriesSummary> Summarize(const ExperimentResult& result) {
  std::vector<std::string> groups;
  std::vector<double> xs;
  for (const auto& r : result.raw) {
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) {
      groups.push_back(r.group);
    }
    if (std::find(xs.begin(), xs.end(), r.x) == xs.end()) xs.push_back(r.x);
  }
  std::vector<SeriesSummary> out;
  for (const auto& group : groups) {
    for (std::size_t mi = 0; mi < result.metrics.size(); ++mi) {
      SeriesSummary s;
      s.group = group;
      s.metric = result.metrics[mi];
      for (double x : xs) {
        double sum = 0.0, sq = 0.0;
        int count = 0;
        for (const auto& r : result.raw) {
          if (r.group != group || r.x != x || !r.ok) continue;
          const double v = r.values[mi];
          if (!std::isfinite(v)) continue;
          sum += v;
          ++count;
        }
        if (count == 0) continue;
        const double mean = sum / count;
        for (const auto& r : result.raw) {
          if (r.group != group || r.x != x || !r.ok) continue;
          const double v = r.values[mi];
          if (std::isfinite(v)) sq += (v - mean) * (v - mean);
        }
        const double sd = count > 1 ? std::sqrt(sq / (count - 1)) : 0.0;
        s.x.push_back(x);
        s.mean.push_back(mean);
        s.stddev.push_back(sd);
        s.stderr_.push_back(sd / std::sqrt(static_cast<double>(count)));
        s.count.push_back(count);
      }
      const bool positive = std::all_of(s.mean.begin(), s.mean.end(),
                                        [](double v) { return v > 0.0; });
      if (result.fit_slopes && s.x.size() >= 4 && positive) {
        s.slope = FitLogLogSlope(s.x, s.mean);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

void WriteExperimentOutputs(const ExperimentResult& result,
                            const std::string& output_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(output_dir) / result.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const std::string preamble = CsvPreamble(result);

  std::ostringstream raw;
  raw << preamble << "trial,group,x,ok,floored";
  for (const auto& m : result.metrics) raw << "," << m;
  raw << ",error\n";
  for (const auto& r : result.raw) {
    raw << r.trial << "," << CsvQuote(r.group) << "," << FormatDouble(r.x)
        << "," << (r.ok ? 1 : 0) << "," << (r.floored ? 1 : 0);
    for (double v : r.values) raw << "," << FormatDouble(v);
    raw << "," << CsvQuote(r.error) << "\n";
  }
  WriteTextFile((dir / "raw.csv").string(), raw.str());

  WriteJsonFile((dir / "summary.json").string(), SummaryJson(result));

  std::ostringstream plot;
  plot << preamble << "group,x";
  for (const auto& m : result.metrics) {
    plot << "," << m << "_mean," << m << "_std," << m << "_stderr";
  }
  plot << "\n";
  std::vector<std::string> groups;
  for (const auto& s : result.series) {
    if (std::find(groups.begin(), groups.end(), s.group) == groups.end()) {
      groups.push_back(s.group);
    }
  }
  for (const auto& group : groups) {
    const SeriesSummary& first = result.Series(group, result.metrics.front());
    for (std::size_t i = 0; i < first.x.size(); ++i) {
      plot << CsvQuote(group) << "," << FormatDouble(first.x[i]);
      for (const auto& m : result.metrics) {
        const SeriesSummary& s = result.Series(group, m);
        auto it = std::find(s.x.begin(), s.x.end(), first.x[i]);
        if (it == s.x.end()) {
          plot << ",nan,nan,nan";
          continue;
        }
        const std::size_t j = static_cast<std::size_t>(it - s.x.begin());
        plot << "," << FormatDouble(s.mean[j]) << ","
             << FormatDouble(s.stddev[j]) << "," << FormatDouble(s.stderr_[j]);
      }
      plot << "\n";
    }
  }
  WriteTextFile((dir / "plotdata.csv").string(), plot.str());
}

}  // namespace qrinv
