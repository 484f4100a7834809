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

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrinv/estimators.h"
#include "qrinv/experiments.h"
#include "qrinv/game_models.h"
#include "qrinv/qre_solver.h"
#include "qrinv/sampling.h"
#include "qrinv/self_test.h"
#include "qrinv/serialization.h"
#include "qrinv/system_builder.h"

namespace qrinv {
namespace {

// Raw flag values; unset optionals leave the config file untouched.
struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
  std::optional<int> jobs;
  std::string grid;
  std::string mode;
  std::string c_assumed;
  std::optional<int> d_est;
  std::optional<double> floor;
  std::optional<double> alpha;
  int verbose = 0;

  // generate
  std::string type;
  std::optional<int> m, n, d, states;
  std::optional<double> tau, norm, gamma;
  bool with_qre = false;

  // solve-qre, estimate, confset
  std::string game;
  std::string data;
  std::string policy;
  std::string save_data;
  std::optional<std::int64_t> samples;
  std::optional<double> delta, xi, tau_max;
  std::optional<int> directions;
  std::string tau_grid;

  // experiment
  std::string experiment;
  bool fixed_game = false;
};

template <typename T>
T Field(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument("config." + key + ": missing or wrong type");
  }
}

void RejectUnknownKeys(const Json& cfg, const std::vector<std::string>& known) {
  for (const auto& [key, value] : cfg.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument("config." + key + ": unknown field");
    }
  }
}

Json LoadConfig(const Flags& f) {
  if (f.config_path.empty()) return Json::object();
  Json cfg = ReadJsonFile(f.config_path);
  if (!cfg.is_object()) {
    throw InvalidArgument(f.config_path + ": expected a JSON object");
  }
  return cfg;
}

template <typename T>
void Override(Json& cfg, const char* key, const std::optional<T>& value) {
  if (value) cfg[key] = *value;
}

template <typename T>
std::vector<T> ParseList(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    T v{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidArgument(std::string(flag) + ": cannot parse '" + item + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

void Emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    WriteJsonFile(path, j);
  }
}

void EmitText(const std::string& text, const std::string& path,
              std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    WriteTextFile(path, text);
  }
}

Json Envelope(const char* command, const Json& cfg) {
  return {{"tool", ToolInfo()}, {"command", command}, {"config", cfg}};
}

// ---------------------------------------------------------------- generate

int RunGenerate(const Flags& f, std::ostream& out, std::ostream& err) {
  Json cfg = LoadConfig(f);
  if (!f.type.empty()) cfg["type"] = f.type;
  Override(cfg, "seed", f.seed);
  Override(cfg, "m", f.m);
  Override(cfg, "n", f.n);
  Override(cfg, "d", f.d);
  Override(cfg, "num_states", f.states);
  Override(cfg, "tau_star", f.tau);
  Override(cfg, "norm", f.norm);
  Override(cfg, "gamma", f.gamma);
  if (f.with_qre) cfg["with_qre"] = true;
  RejectUnknownKeys(cfg, {"type", "seed", "m", "n", "d", "num_states",
                          "tau_star", "norm", "gamma", "with_qre"});

  const std::string type = cfg.value("type", std::string("matrix"));
  Json effective;
  if (type == "matrix") {
    effective = {{"type", "matrix"}, {"seed", 1}, {"m", 10}, {"n", 10},
                 {"d", 5}, {"tau_star", 2.0}, {"norm", 1.0},
                 {"with_qre", false}};
  } else if (type == "markov") {
    effective = {{"type", "markov"}, {"seed", 1}, {"num_states", 8},
                 {"m", 5}, {"n", 5}, {"d", 6}, {"tau_star", 1.5},
                 {"norm", 1.0}, {"gamma", 0.9}, {"with_qre", false}};
  } else {
    throw InvalidArgument("config.type: expected 'matrix' or 'markov'");
  }
  for (const auto& [key, value] : cfg.items()) {
    if (!effective.contains(key)) {
      throw InvalidArgument("config." + key + ": not used by " + type +
                            " games");
    }
    effective[key] = value;
  }
  const Seed seed{Field<std::uint64_t>(effective, "seed")};
  Rng rng = Rng::ForStream(seed, 0, StreamPurpose::kGame);
  Json doc;
  if (type == "matrix") {
    const MatrixGameSpec spec = GenerateMatrixGame(
        Field<int>(effective, "m"), Field<int>(effective, "n"),
        Field<int>(effective, "d"), Field<double>(effective, "tau_star"),
        Field<double>(effective, "norm"), rng);
    doc = ToJson(spec);
    if (Field<bool>(effective, "with_qre")) {
      const QreSolution sol = SolveMatrixQre(spec.Payoff(), spec.tau_star,
                                             SolverConfig{.tol = 1e-13});
      if (!sol.converged) throw NumericalError("QRE solve did not converge");
      doc["observed_policy"] = ToJson(sol.policy);
    }
  } else {
    const MarkovGameSpec spec = GenerateMarkovGame(
        Field<int>(effective, "num_states"), Field<int>(effective, "m"),
        Field<int>(effective, "n"), Field<int>(effective, "d"),
        Field<double>(effective, "tau_star"), Field<double>(effective, "norm"),
        Field<double>(effective, "gamma"), rng);
    doc = ToJson(spec);
    if (Field<bool>(effective, "with_qre")) {
      Json policies = Json::array();
      for (const auto& p : spec.equilibrium.policies) {
        policies.push_back(ToJson(p));
      }
      doc["observed_policies"] = policies;
    }
  }
  doc["generator"] = effective;
  if (f.verbose > 0) err << "generated " << type << " game\n";
  Emit(doc, f.out, out);
  return 0;
}

// --------------------------------------------------------------- solve-qre

int RunSolveQre(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.game.empty()) throw InvalidArgument("--game is required");
  Json cfg = LoadConfig(f);
  Override(cfg, "tau", f.tau);
  RejectUnknownKeys(cfg, {"tau", "solver"});
  const SolverConfig solver =
      SolverConfigFromJson(cfg.value("solver", Json::object()));
  const Json game = ReadJsonFile(f.game);

  Json doc;
  if (GameType(game) == "matrix-game") {
    const MatrixGameSpec spec = MatrixGameFromJson(game);
    const double tau = cfg.value("tau", spec.tau_star);
    cfg["tau"] = tau;
    cfg["solver"] = ToJson(solver);
    const QreSolution sol = SolveMatrixQre(spec.Payoff(), tau, solver);
    doc = Envelope("solve-qre", cfg);
    doc["solution"] = ToJson(sol);
    if (!sol.converged) {
      throw NumericalError("QRE solve did not converge (residual " +
                           FormatDouble(sol.residual) + ")");
    }
  } else {
    const MarkovGameSpec spec = MarkovGameFromJson(game);
    const double tau = cfg.value("tau", spec.tau_star);
    cfg["tau"] = tau;
    cfg["solver"] = ToJson(solver);
    const MarkovQreSolution sol = ForwardSolveMarkov(
        spec.reward, spec.transitions, spec.gamma, tau, solver);
    doc = Envelope("solve-qre", cfg);
    doc["solution"] = ToJson(sol);
    if (!sol.converged) {
      throw NumericalError("Markov forward solve did not converge");
    }
  }
  if (f.verbose > 0) err << "solved equilibrium\n";
  Emit(doc, f.out, out);
  return 0;
}

// ---------------------------------------------------------------- estimate

// Observed play for a matrix game, from a counts file, internal sampling, or
// an exact policy.
struct MatrixObservation {
  JointPolicy policy;
  bool floored = false;
  std::string source;
  std::int64_t samples = 0;
};

JointPolicy ReadObservedPolicy(const Flags& f, const Json& game) {
  if (!f.policy.empty()) {
    const Json j = ReadJsonFile(f.policy);
    return PolicyFromJson(j.contains("observed_policy") ? j["observed_policy"]
                                                        : j);
  }
  return PolicyFromJson(game.at("observed_policy"));
}

MatrixObservation ObserveMatrix(const Flags& f, const Json& cfg,
                                const Json& game, const MatrixGameSpec& spec) {
  MatrixObservation obs;
  std::optional<double> floor;
  if (cfg.contains("floor")) floor = Field<double>(cfg, "floor");
  if (!f.data.empty()) {
    const MatrixSample sample = ReadMatrixSample(f.data);
    const EmpiricalPolicy emp = EmpiricalPolicies(sample, floor);
    obs = {emp.policy, emp.floored, "data", sample.total};
  } else if (cfg.contains("samples")) {
    const QreSolution qre = SolveMatrixQre(spec.Payoff(), spec.tau_star,
                                           SolverConfig{.tol = 1e-12});
    if (!qre.converged) throw NumericalError("QRE solve did not converge");
    Rng rng = Rng::ForStream(Seed{cfg.value("seed", std::uint64_t{1})}, 0,
                             StreamPurpose::kPlay);
    const MatrixSample sample =
        SampleMatrixPlay(qre.policy, Field<std::int64_t>(cfg, "samples"), rng);
    if (!f.save_data.empty()) WriteMatrixSample(sample, f.save_data, cfg);
    const EmpiricalPolicy emp = EmpiricalPolicies(sample, floor);
    obs = {emp.policy, emp.floored, "sampled", sample.total};
  } else if (!f.policy.empty() || game.contains("observed_policy")) {
    obs.policy = ReadObservedPolicy(f, game);
    obs.source = "policy";
  } else {
    throw InvalidArgument(
        "no observations: pass --data, --samples, or --policy");
  }
  return obs;
}

int EstimateMatrix(const Flags& f, Json cfg, const Json& game,
                   std::ostream& out) {
  const MatrixGameSpec spec = MatrixGameFromJson(game);
  const double norm = cfg.value("norm", spec.norm_c);
  cfg["norm"] = norm;
  const MatrixObservation obs = ObserveMatrix(f, cfg, game, spec);
  const LinearSystem sys = BuildSystem(spec.features, obs.policy);
  const EstimationResult est = NlsEstimate(sys, norm);
  Json doc = Envelope("estimate", cfg);
  doc["game_type"] = "matrix-game";
  doc["source"] = obs.source;
  doc["floored"] = obs.floored;
  doc["estimate"] = ToJson(est);
  doc["errors"] = {{"theta", (est.theta_hat - spec.theta_star).norm()},
                   {"tau", std::abs(est.tau_hat - spec.tau_star)}};
  Emit(doc, f.out, out);
  return 0;
}

int EstimateMarkov(const Flags& f, Json cfg, const Json& game,
                   std::ostream& out) {
  const MarkovGameSpec spec = MarkovGameFromJson(game);
  const double norm = cfg.value("norm", spec.norm_r);
  cfg["norm"] = norm;
  const DynamicsMode mode =
      ParseDynamicsMode(cfg.value("mode", std::string("known-p")));
  cfg["mode"] = ToString(mode);
  std::optional<double> floor;
  if (cfg.contains("floor")) floor = Field<double>(cfg, "floor");

  std::optional<MarkovDataset> data;
  std::vector<JointPolicy> policies;
  bool floored = false;
  std::string source;
  if (!f.data.empty()) {
    data = ReadMarkovDataset(f.data);
    source = "data";
  } else if (cfg.contains("samples")) {
    const std::int64_t per_state =
        Field<std::int64_t>(cfg, "samples") / spec.num_states();
    if (per_state < 1) {
      throw InvalidArgument("config.samples: need at least one per state");
    }
    Rng rng = Rng::ForStream(Seed{cfg.value("seed", std::uint64_t{1})}, 0,
                             StreamPurpose::kPlay);
    data = SampleMarkovDataset(spec.transitions, spec.equilibrium.policies,
                               per_state, rng);
    if (!f.save_data.empty()) WriteMarkovDataset(*data, f.save_data, cfg);
    source = "sampled";
  }
  if (data) {
    for (auto& emp : EmpiricalStatePolicies(*data, floor)) {
      floored = floored || emp.floored;
      policies.push_back(std::move(emp.policy));
    }
  } else {
    const Json src = f.policy.empty() ? game : ReadJsonFile(f.policy);
    if (!src.contains("observed_policies")) {
      throw InvalidArgument(
          "no observations: pass --data, --samples, or --policy");
    }
    for (const auto& p : src["observed_policies"]) {
      policies.push_back(PolicyFromJson(p));
    }
    source = "policy";
  }
  TransitionTensor p_used = spec.transitions;
  if (mode == DynamicsMode::kEstimatedP) {
    if (!data) {
      throw InvalidArgument(
          "config.mode: estimated-p needs transition counts (--data or "
          "--samples)");
    }
    p_used = EstimateTransitions(*data, cfg.value("alpha", 1.0));
  }
  const MarkovRecovery rec = RecoverMarkovRewards(
      BuildMarkovSystem(spec.features, policies), norm, spec.features,
      policies, p_used, spec.gamma, mode);
  double reward_error = 0.0;
  for (int s = 0; s < spec.num_states(); ++s) {
    reward_error = std::max(
        reward_error, (rec.r_hat[s] - spec.reward[s]).cwiseAbs().maxCoeff());
  }
  Json doc = Envelope("estimate", cfg);
  doc["game_type"] = "markov-game";
  doc["source"] = source;
  doc["floored"] = floored;
  doc["recovery"] = ToJson(rec);
  doc["errors"] = {{"theta", (rec.theta_hat() - spec.theta_star).norm()},
                   {"tau", std::abs(rec.tau_hat() - spec.tau_star)},
                   {"reward", reward_error}};
  Emit(doc, f.out, out);
  return 0;
}

std::optional<double> SingleCAssumed(const Flags& f) {
  if (f.c_assumed.empty()) return std::nullopt;
  const auto values = ParseList<double>(f.c_assumed, "--c-assumed");
  if (values.size() != 1) {
    throw InvalidArgument("--c-assumed: expected a single value");
  }
  return values.front();
}

int RunEstimate(const Flags& f, std::ostream& out) {
  if (f.game.empty()) throw InvalidArgument("--game is required");
  Json cfg = LoadConfig(f);
  Override(cfg, "seed", f.seed);
  Override(cfg, "samples", f.samples);
  Override(cfg, "norm", SingleCAssumed(f));
  Override(cfg, "floor", f.floor);
  Override(cfg, "alpha", f.alpha);
  if (!f.mode.empty()) cfg["mode"] = f.mode;
  RejectUnknownKeys(cfg,
                    {"seed", "samples", "norm", "floor", "alpha", "mode"});
  if (!cfg.contains("seed")) cfg["seed"] = 1;
  const Json game = ReadJsonFile(f.game);
  if (GameType(game) == "matrix-game") {
    if (cfg.contains("mode") || cfg.contains("alpha")) {
      throw InvalidArgument("config.mode/alpha: only used for Markov games");
    }
    return EstimateMatrix(f, cfg, game, out);
  }
  return EstimateMarkov(f, cfg, game, out);
}

// ----------------------------------------------------------------- confset

int RunConfset(const Flags& f, std::ostream& out) {
  if (f.game.empty()) throw InvalidArgument("--game is required");
  Json cfg = LoadConfig(f);
  Override(cfg, "seed", f.seed);
  Override(cfg, "samples", f.samples);
  Override(cfg, "norm", SingleCAssumed(f));
  Override(cfg, "floor", f.floor);
  Override(cfg, "delta", f.delta);
  Override(cfg, "xi", f.xi);
  Override(cfg, "tau_max", f.tau_max);
  Override(cfg, "directions", f.directions);
  if (!f.tau_grid.empty()) {
    cfg["tau_grid"] = ParseList<double>(f.tau_grid, "--tau-grid");
  }
  RejectUnknownKeys(cfg, {"seed", "samples", "norm", "floor", "delta", "xi",
                          "tau_max", "directions", "tau_grid"});
  if (!cfg.contains("seed")) cfg["seed"] = 1;
  if (!cfg.contains("directions")) cfg["directions"] = 256;
  const Json game = ReadJsonFile(f.game);
  if (GameType(game) != "matrix-game") {
    throw InvalidArgument("confset supports matrix games only");
  }
  const MatrixGameSpec spec = MatrixGameFromJson(game);
  const MatrixObservation obs = ObserveMatrix(f, cfg, game, spec);

  ConfidenceConfig cc;
  cc.delta = cfg.value("delta", 0.05);
  cc.feature_bound = spec.features.bound();
  cc.norm_c = cfg.value("norm", spec.norm_c);
  cc.tau_max = cfg.value("tau_max", spec.tau_star);
  cc.m = spec.features.rows();
  cc.n = spec.features.cols();
  cc.samples = obs.samples > 0 ? obs.samples
                               : cfg.value("samples", std::int64_t{0});
  const JointPolicy observed[] = {obs.policy};
  const bool plug_in_xi = !cfg.contains("xi");
  cc.xi = plug_in_xi ? PlugInSoftMinGap(observed) : Field<double>(cfg, "xi");
  cc.Validate();
  const double kappa = ConfidenceThreshold(cc);

  std::vector<double> tau_grid;
  if (cfg.contains("tau_grid")) {
    tau_grid = Field<std::vector<double>>(cfg, "tau_grid");
  } else {
    for (int i = 0; i < 25; ++i) {
      tau_grid.push_back(cc.tau_max * 0.1 * std::pow(20.0, i / 24.0));
    }
  }
  const int directions = cfg.value("directions", 256);
  const LinearSystem sys = BuildSystem(spec.features, obs.policy);
  Rng rng = Rng::ForStream(Seed{cfg.value("seed", std::uint64_t{1})}, 0,
                           StreamPurpose::kConfidenceScan);
  const auto points =
      ScanConfidenceSet(sys, cc.norm_c, kappa, directions, tau_grid, rng);

  Json meta = Envelope("confset", cfg);
  meta["confidence"] = ToJson(cc);
  meta["xi_source"] = plug_in_xi ? "plug-in (min observed probability)"
                                 : "config";
  meta["kappa"] = kappa;
  meta["truth_inside"] =
      ConfidenceContains(sys, spec.theta_star, spec.tau_star, kappa, cc.norm_c);
  const std::string csv = ConfidenceScanCsv(points, meta);
  EmitText(csv, f.out, out);
  if (!f.out.empty()) {
    int inside = 0;
    for (const auto& p : points) inside += p.inside ? 1 : 0;
    meta["points"] = points.size();
    meta["inside"] = inside;
    out << meta.dump(2) << "\n";
  }
  return 0;
}

// -------------------------------------------------------------- experiment

int RunExperimentCommand(const Flags& f, std::ostream& out, std::ostream& err) {
  const ExperimentKind kind = ParseExperimentKind(f.experiment);
  Json cfg = LoadConfig(f);
  Override(cfg, "seed", f.seed);
  Override(cfg, "trials", f.trials);
  Override(cfg, "jobs", f.jobs);
  Override(cfg, "d_est", f.d_est);
  Override(cfg, "floor", f.floor);
  Override(cfg, "alpha", f.alpha);
  if (f.fixed_game) cfg["fixed_game"] = true;
  if (!f.grid.empty()) {
    cfg["grid"] = ParseList<std::int64_t>(f.grid, "--grid");
  }
  ExperimentConfig config =
      ExperimentConfigFromJson(cfg, DefaultExperimentConfig(kind));
  if (!f.c_assumed.empty()) {
    config.c_ratios.clear();
    for (double c : ParseList<double>(f.c_assumed, "--c-assumed")) {
      config.c_ratios.push_back(c / config.norm);
    }
  }
  if (!f.mode.empty()) {
    throw InvalidArgument(
        "--mode: experiments run their own recovery modes; use it with "
        "estimate");
  }
  config.Validate();
  if (f.verbose > 0) err << "config: " << ToJson(config).dump() << "\n";

  const ExperimentResult result = RunExperiment(kind, config);
  const std::string dir = f.out.empty() ? "results" : f.out;
  WriteExperimentOutputs(result, dir);

  out << result.name << ": " << config.trials << " trials, "
      << result.failures << " failed; outputs in " << dir << "/"
      << result.name << "\n";
  for (const auto& s : result.series) {
    out << "  " << s.group << " " << s.metric << ":";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << " " << FormatDouble(s.x[i]) << "->" << FormatDouble(s.mean[i]);
    }
    if (s.slope) out << "  slope " << FormatDouble(*s.slope);
    out << "\n";
  }
  if (kind == ExperimentKind::kComparisonTable) {
    for (const auto& row : ComparisonTable(result)) {
      out << "  table " << row.method << " tau=" << row.tau
          << " mean=" << FormatDouble(row.mean_error)
          << " std=" << FormatDouble(row.stddev) << "\n";
    }
  }
  return 0;
}

// ------------------------------------------------------------------ verify

int RunVerify(std::ostream& out) {
  int failed = 0;
  for (const CheckResult& r : RunSelfTest()) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.passed) {
      out << ": " << r.detail;
      ++failed;
    }
    out << "\n";
  }
  out << (failed == 0 ? "all checks passed" : "some checks failed") << "\n";
  return failed == 0 ? 0 : static_cast<int>(ErrorKind::kNumerical);
}

const char* KindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return "usage";
    case ErrorKind::kNumerical:
      return "numerical";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  Flags f;
  CLI::App app{"Recover payoff parameters and rationality temperature from "
               "quantal-response play",
               "qrinv"};
  app.set_version_flag("--version", std::string(QRINV_VERSION));
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON configuration file");
    sub->add_option("--out", f.out, "Output file (or directory)");
    sub->add_flag("-v,--verbose", f.verbose, "Progress messages on stderr");
  };
  auto observations = [&](CLI::App* sub) {
    sub->add_option("--game", f.game, "Game spec JSON")->required();
    sub->add_option("--data", f.data, "Counts prefix (<prefix>.json + CSV)");
    sub->add_option("--policy", f.policy, "JSON file with observed policies");
    sub->add_option("--samples", f.samples, "Sample internally: N or K");
    sub->add_option("--save-data", f.save_data, "Write drawn counts to prefix");
    sub->add_option("--seed", f.seed, "Seed for internal sampling");
    sub->add_option("--floor", f.floor, "Zero-frequency floor");
    sub->add_option("--c-assumed", f.c_assumed, "Normalization C (or R)");
  };

  CLI::App* gen = app.add_subcommand("generate", "Write a game spec");
  common(gen);
  gen->add_option("--type", f.type, "matrix or markov");
  gen->add_option("--seed", f.seed, "Master seed");
  gen->add_option("--m", f.m, "Player-1 actions");
  gen->add_option("--n", f.n, "Player-2 actions");
  gen->add_option("--d", f.d, "Feature dimension");
  gen->add_option("--states", f.states, "States (Markov)");
  gen->add_option("--tau", f.tau, "True temperature");
  gen->add_option("--norm", f.norm, "Norm of theta (C or R)");
  gen->add_option("--gamma", f.gamma, "Discount (Markov)");
  gen->add_flag("--with-qre", f.with_qre, "Embed the exact equilibrium play");

  CLI::App* solve = app.add_subcommand("solve-qre", "Solve a spec's QRE");
  common(solve);
  solve->add_option("--game", f.game, "Game spec JSON")->required();
  solve->add_option("--tau", f.tau, "Temperature (default: the game file's tau_star)");

  CLI::App* est = app.add_subcommand("estimate", "Recover theta and tau");
  common(est);
  observations(est);
  est->add_option("--mode", f.mode, "known-p or estimated-p (Markov)");
  est->add_option("--alpha", f.alpha, "Laplace smoothing for estimated-p");

  CLI::App* conf = app.add_subcommand("confset", "Scan the confidence set");
  common(conf);
  observations(conf);
  conf->add_option("--delta", f.delta, "Failure probability");
  conf->add_option("--xi", f.xi, "Soft-min gap (default: plug-in)");
  conf->add_option("--tau-max", f.tau_max, "Temperature bound");
  conf->add_option("--directions", f.directions, "Random sphere directions");
  conf->add_option("--tau-grid", f.tau_grid, "Comma-separated temperatures");

  CLI::App* exp = app.add_subcommand("experiment", "Run an experiment sweep");
  common(exp);
  std::vector<std::string> names;
  for (ExperimentKind k : AllExperimentKinds()) {
    names.emplace_back(ExperimentName(k));
  }
  exp->add_option("name", f.experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(names));
  exp->add_option("--seed", f.seed, "Master seed");
  exp->add_option("--trials", f.trials, "Trials per grid point");
  exp->add_option("--jobs", f.jobs, "Worker threads (0 = all cores)");
  exp->add_option("--grid", f.grid, "Comma-separated N (or K) values");
  exp->add_option("--mode", f.mode, "Not used by experiments");
  exp->add_option("--c-assumed", f.c_assumed, "Comma-separated assumed C");
  exp->add_option("--d-est", f.d_est, "Estimation feature count");
  exp->add_option("--floor", f.floor, "Zero-frequency floor");
  exp->add_option("--alpha", f.alpha, "Laplace smoothing");
  exp->add_flag("--fixed-game", f.fixed_game, "One game shared by all trials");

  CLI::App* verify = app.add_subcommand("verify", "Run built-in oracle checks");
  verify->add_flag("-v,--verbose", f.verbose, "Unused");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kUsage);
  }

  try {
    if (gen->parsed()) return RunGenerate(f, out, err);
    if (solve->parsed()) return RunSolveQre(f, out, err);
    if (est->parsed()) return RunEstimate(f, out);
    if (conf->parsed()) return RunConfset(f, out);
    if (exp->parsed()) return RunExperimentCommand(f, out, err);
    if (verify->parsed()) return RunVerify(out);
  } catch (const Error& e) {
    const Json diag = {{"error", KindName(e.kind())}, {"message", e.what()}};
    err << diag.dump() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    const Json diag = {{"error", "internal"}, {"message", e.what()}};
    err << diag.dump() << "\n";
    return 1;
  }
  return static_cast<int>(ErrorKind::kUsage);
}

}  // namespace qrinv
