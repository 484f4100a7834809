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

#include "qrinv/serialization.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qrinv {
namespace {

// Reads j[key] as T, reporting the offending key on a missing or mistyped
// field.
template <typename T>
T Get(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) {
    throw InvalidArgument(where + "." + key + ": missing field");
  }
  try {
    return it->template get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument(where + "." + key + ": wrong type");
  }
}

template <typename T>
T GetOr(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return Get<T>(j, key, where);
}

// JSON has no NaN; non-finite values are written as null.
Json Number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json Numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(Number(x));
  return out;
}

Json MatrixJson(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(Number(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json TablesJson(const StateTables& tables) {
  Json out = Json::array();
  for (const Matrix& t : tables) out.push_back(MatrixJson(t));
  return out;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::int64_t ParseInt(const std::string& text, const std::string& where) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(where + ": bad integer '" + text + "'");
  }
  return v;
}

// Non-comment, non-empty CSV lines after the header.
std::vector<std::vector<std::string>> CsvRows(const std::string& path,
                                              std::size_t expected_cols) {
  std::istringstream is(ReadTextFile(path));
  std::string line;
  bool header = true;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = SplitCsvLine(line);
    if (fields.size() != expected_cols) {
      throw IoError(path + ": expected " + std::to_string(expected_cols) +
                    " columns, got " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  // Integral values (sample sizes, counts) print as plain integers.
  if (v == std::trunc(v) && std::abs(v) < 1e15) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf),
                                   static_cast<long long>(v));
    return std::string(buf, ptr);
  }
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Json ToolInfo() { return {{"name", "qrinv"}, {"version", QRINV_VERSION}}; }

Json ToJson(const Vector& v) {
  return Numbers(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector VectorFromJson(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument("expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json ToJson(const JointPolicy& policy) {
  return {{"mu", ToJson(policy.mu)}, {"nu", ToJson(policy.nu)}};
}

JointPolicy PolicyFromJson(const Json& j) {
  return {VectorFromJson(Get<Json>(j, "mu", "policy")),
          VectorFromJson(Get<Json>(j, "nu", "policy"))};
}

Json ToJson(const FeatureMap& features) {
  return {{"kind", features.kind() == FeatureKind::kMatrix ? "matrix" : "markov"},
          {"num_states", features.num_states()},
          {"m", features.rows()},
          {"n", features.cols()},
          {"d", features.dim()},
          {"bound", features.bound()},
          {"values", features.values()}};
}

FeatureMap FeatureMapFromJson(const Json& j) {
  const std::string where = "features";
  const auto kind = Get<std::string>(j, "kind", where);
  const int m = Get<int>(j, "m", where);
  const int n = Get<int>(j, "n", where);
  const int d = Get<int>(j, "d", where);
  auto values = Get<std::vector<double>>(j, "values", where);
  if (kind == "matrix") return FeatureMap::ForMatrixGame(m, n, d, std::move(values));
  if (kind == "markov") {
    return FeatureMap::ForMarkovGame(Get<int>(j, "num_states", where), m, n, d,
                                     std::move(values));
  }
  throw InvalidArgument("features.kind: expected 'matrix' or 'markov'");
}

Json ToJson(const MatrixGameSpec& spec) {
  return {{"type", "matrix-game"},
          {"tool", ToolInfo()},
          {"tau_star", spec.tau_star},
          {"norm_c", spec.norm_c},
          {"theta_star", ToJson(spec.theta_star)},
          {"features", ToJson(spec.features)}};
}

MatrixGameSpec MatrixGameFromJson(const Json& j) {
  if (GameType(j) != "matrix-game") {
    throw InvalidArgument("type: expected 'matrix-game'");
  }
  MatrixGameSpec spec;
  spec.features = FeatureMapFromJson(Get<Json>(j, "features", "game"));
  if (spec.features.kind() != FeatureKind::kMatrix) {
    throw InvalidArgument("features.kind: matrix game needs matrix features");
  }
  spec.theta_star = VectorFromJson(Get<Json>(j, "theta_star", "game"));
  spec.tau_star = Get<double>(j, "tau_star", "game");
  spec.norm_c = GetOr<double>(j, "norm_c", spec.theta_star.norm(), "game");
  if (spec.theta_star.size() != spec.features.dim()) {
    throw InvalidArgument("game.theta_star: length does not match features.d");
  }
  if (!(spec.tau_star > 0.0)) {
    throw InvalidArgument("game.tau_star: must be positive");
  }
  return spec;
}

Json ToJson(const MarkovGameSpec& spec) {
  return {{"type", "markov-game"},
          {"tool", ToolInfo()},
          {"tau_star", spec.tau_star},
          {"norm_r", spec.norm_r},
          {"gamma", spec.gamma},
          {"theta_star", ToJson(spec.theta_star)},
          {"features", ToJson(spec.features)},
          {"transitions", spec.transitions.values()},
          {"reward", TablesJson(spec.reward)}};
}

MarkovGameSpec MarkovGameFromJson(const Json& j, const SolverConfig& solver) {
  if (GameType(j) != "markov-game") {
    throw InvalidArgument("type: expected 'markov-game'");
  }
  MarkovGameSpec spec;
  spec.features = FeatureMapFromJson(Get<Json>(j, "features", "game"));
  spec.theta_star = VectorFromJson(Get<Json>(j, "theta_star", "game"));
  spec.tau_star = Get<double>(j, "tau_star", "game");
  spec.norm_r = GetOr<double>(j, "norm_r", spec.theta_star.norm(), "game");
  spec.gamma = Get<double>(j, "gamma", "game");
  if (spec.theta_star.size() != spec.features.dim()) {
    throw InvalidArgument("game.theta_star: length does not match features.d");
  }
  if (!(spec.tau_star > 0.0)) {
    throw InvalidArgument("game.tau_star: must be positive");
  }
  if (!(spec.gamma >= 0.0 && spec.gamma < 1.0)) {
    throw InvalidArgument("game.gamma: must lie in [0, 1)");
  }
  spec.transitions = TransitionTensor(
      spec.features.num_states(), spec.features.rows(), spec.features.cols(),
      Get<std::vector<double>>(j, "transitions", "game"));
  if (spec.transitions.StochasticityError() > 1e-9) {
    throw InvalidArgument("game.transitions: rows must be probability vectors");
  }
  spec.equilibrium = PoliciesFromQTables(spec.QTables(), spec.tau_star, solver);
  if (!spec.equilibrium.converged) {
    throw NumericalError("QRE solve failed while loading the game");
  }
  spec.reward = BellmanInversion(spec.equilibrium.q, spec.equilibrium.v,
                                 spec.transitions, spec.gamma);
  return spec;
}

std::string GameType(const Json& j) {
  const auto type = Get<std::string>(j, "type", "game");
  if (type != "matrix-game" && type != "markov-game") {
    throw InvalidArgument("type: expected 'matrix-game' or 'markov-game'");
  }
  return type;
}

Json ToJson(const SolverConfig& c) {
  return {{"tol", c.tol},
          {"max_iter", c.max_iter},
          {"damping", c.damping},
          {"fallback", c.fallback},
          {"newton_max_iter", c.newton_max_iter}};
}

SolverConfig SolverConfigFromJson(const Json& j, SolverConfig base) {
  const std::string where = "solver";
  for (const auto& [key, value] : j.items()) {
    if (key == "tol") {
      base.tol = Get<double>(j, "tol", where);
    } else if (key == "max_iter") {
      base.max_iter = Get<int>(j, "max_iter", where);
    } else if (key == "damping") {
      base.damping = Get<double>(j, "damping", where);
    } else if (key == "fallback") {
      base.fallback = Get<bool>(j, "fallback", where);
    } else if (key == "newton_max_iter") {
      base.newton_max_iter = Get<int>(j, "newton_max_iter", where);
    } else {
      throw InvalidArgument(where + "." + key + ": unknown field");
    }
  }
  base.Validate();
  return base;
}

Json ToJson(const QreSolution& sol) {
  return {{"policy", ToJson(sol.policy)},
          {"payoff", MatrixJson(sol.payoff)},
          {"residual", Number(sol.residual)},
          {"iterations", sol.iterations},
          {"converged", sol.converged},
          {"used_fallback", sol.used_fallback}};
}

Json ToJson(const MarkovQreSolution& sol) {
  Json policies = Json::array();
  for (const auto& p : sol.policies) policies.push_back(ToJson(p));
  Json out = {{"policies", policies},
              {"q", TablesJson(sol.q)},
              {"v", ToJson(sol.v)},
              {"residual", Number(sol.residual)},
              {"iterations", sol.iterations},
              {"converged", sol.converged},
              {"value_deltas", Numbers(sol.value_deltas)}};
  if (sol.failed_state) out["failed_state"] = *sol.failed_state;
  return out;
}

Json ToJson(const IdentifiabilityReport& r) {
  return {{"rank", r.rank},
          {"sigma_min", Number(r.sigma_min)},
          {"sigma_max", Number(r.sigma_max)},
          {"y_norm", Number(r.y_norm)},
          {"identifiable", r.identifiable}};
}

Json ToJson(const EstimationResult& r) {
  return {{"theta_hat", ToJson(r.theta_hat)},
          {"tau_hat", Number(r.tau_hat)},
          {"theta_ls", ToJson(r.theta_ls)},
          {"residual", Number(r.residual)},
          {"identifiability", ToJson(r.identifiability)}};
}

Json ToJson(const MarkovRecovery& r) {
  return {{"estimate", ToJson(r.estimate)},
          {"q_hat", TablesJson(r.q_hat)},
          {"v_hat", ToJson(r.v_hat)},
          {"r_hat", TablesJson(r.r_hat)},
          {"dynamics_mode", ToString(r.dynamics_mode)}};
}

Json ToJson(const ConfidenceConfig& c) {
  return {{"delta", c.delta},         {"xi", c.xi},
          {"feature_bound", c.feature_bound}, {"norm_c", c.norm_c},
          {"tau_max", c.tau_max},     {"m", c.m},
          {"n", c.n},                 {"samples", c.samples}};
}

ConfidenceConfig ConfidenceConfigFromJson(const Json& j, ConfidenceConfig base) {
  const std::string where = "confidence";
  for (const auto& [key, value] : j.items()) {
    if (key == "delta") {
      base.delta = Get<double>(j, "delta", where);
    } else if (key == "xi") {
      base.xi = Get<double>(j, "xi", where);
    } else if (key == "feature_bound") {
      base.feature_bound = Get<double>(j, "feature_bound", where);
    } else if (key == "norm_c") {
      base.norm_c = Get<double>(j, "norm_c", where);
    } else if (key == "tau_max") {
      base.tau_max = Get<double>(j, "tau_max", where);
    } else if (key == "m") {
      base.m = Get<int>(j, "m", where);
    } else if (key == "n") {
      base.n = Get<int>(j, "n", where);
    } else if (key == "samples") {
      base.samples = Get<std::int64_t>(j, "samples", where);
    } else {
      throw InvalidArgument(where + "." + key + ": unknown field");
    }
  }
  return base;
}

Json ToJson(const MatrixSample& s) {
  return {{"counts_a", s.counts_a}, {"counts_b", s.counts_b}, {"total", s.total}};
}

MatrixSample MatrixSampleFromJson(const Json& j) {
  MatrixSample s;
  s.counts_a = Get<std::vector<std::int64_t>>(j, "counts_a", "sample");
  s.counts_b = Get<std::vector<std::int64_t>>(j, "counts_b", "sample");
  s.total = Get<std::int64_t>(j, "total", "sample");
  return s;
}

Json ToJson(const ExperimentConfig& c) {
  Json j = {{"name", c.name},
            {"m", c.m},
            {"n", c.n},
            {"d", c.d},
            {"num_states", c.num_states},
            {"tau_star", c.tau_star},
            {"norm", c.norm},
            {"gamma", c.gamma},
            {"grid", c.grid},
            {"trials", c.trials},
            {"seed", c.seed},
            {"floor", c.floor ? Json(*c.floor) : Json(nullptr)},
            {"alpha", c.alpha},
            {"c_ratios", c.c_ratios},
            {"tau_assumed", c.tau_assumed},
            {"d_est", c.d_est},
            {"fixed_game", c.fixed_game},
            {"delta", c.delta},
            {"tau_max", c.tau_max ? Json(*c.tau_max) : Json(nullptr)},
            {"solver", ToJson(c.solver)}};
  // The worker count does not affect results and is deliberately omitted so
  // outputs are identical for any --jobs value.
  return j;
}

ExperimentConfig ExperimentConfigFromJson(const Json& j, ExperimentConfig base) {
  const std::string where = "config";
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "name") {
      base.name = Get<std::string>(j, k, where);
    } else if (key == "experiment") {
      // Informational; the experiment is selected on the command line.
    } else if (key == "m") {
      base.m = Get<int>(j, k, where);
    } else if (key == "n") {
      base.n = Get<int>(j, k, where);
    } else if (key == "d") {
      base.d = Get<int>(j, k, where);
    } else if (key == "num_states") {
      base.num_states = Get<int>(j, k, where);
    } else if (key == "tau_star") {
      base.tau_star = Get<double>(j, k, where);
    } else if (key == "norm") {
      base.norm = Get<double>(j, k, where);
    } else if (key == "gamma") {
      base.gamma = Get<double>(j, k, where);
    } else if (key == "grid") {
      base.grid = Get<std::vector<std::int64_t>>(j, k, where);
    } else if (key == "trials") {
      base.trials = Get<int>(j, k, where);
    } else if (key == "seed") {
      base.seed = Get<std::uint64_t>(j, k, where);
    } else if (key == "floor") {
      base.floor = value.is_null() ? std::nullopt
                                   : std::optional(Get<double>(j, k, where));
    } else if (key == "alpha") {
      base.alpha = Get<double>(j, k, where);
    } else if (key == "c_ratios") {
      base.c_ratios = Get<std::vector<double>>(j, k, where);
    } else if (key == "tau_assumed") {
      base.tau_assumed = Get<std::vector<double>>(j, k, where);
    } else if (key == "d_est") {
      base.d_est = Get<int>(j, k, where);
    } else if (key == "fixed_game") {
      base.fixed_game = Get<bool>(j, k, where);
    } else if (key == "jobs") {
      base.jobs = Get<int>(j, k, where);
    } else if (key == "delta") {
      base.delta = Get<double>(j, k, where);
    } else if (key == "tau_max") {
      base.tau_max = value.is_null() ? std::nullopt
                                     : std::optional(Get<double>(j, k, where));
    } else if (key == "solver") {
      base.solver = SolverConfigFromJson(value, base.solver);
    } else {
      throw InvalidArgument(where + "." + key + ": unknown field");
    }
  }
  return base;
}

Json SummaryJson(const ExperimentResult& result) {
  Json series = Json::array();
  for (const auto& s : result.series) {
    series.push_back({{"group", s.group},
                      {"metric", s.metric},
                      {"x", Numbers(s.x)},
                      {"mean", Numbers(s.mean)},
                      {"std", Numbers(s.stddev)},
                      {"stderr", Numbers(s.stderr_)},
                      {"count", s.count},
                      {"slope", s.slope ? Number(*s.slope) : Json(nullptr)}});
  }
  return {{"tool", ToolInfo()},
          {"experiment", result.name},
          {"seed", result.config.seed},
          {"config", ToJson(result.config)},
          {"trials", result.config.trials},
          {"grid", result.config.grid},
          {"metrics", result.metrics},
          {"failed_trials", result.failures},
          {"series", series}};
}

void WriteMarkovDataset(const MarkovDataset& data, const std::string& prefix,
                        const Json& metadata) {
  std::ostringstream pairs;
  pairs << "state,a,b,count\n";
  std::ostringstream trans;
  trans << "state,a,b,next,count\n";
  for (int s = 0; s < data.num_states(); ++s) {
    for (int a = 0; a < data.rows(); ++a) {
      for (int b = 0; b < data.cols(); ++b) {
        pairs << s << "," << a << "," << b << "," << data.pair_count(s, a, b)
              << "\n";
        for (int t = 0; t < data.num_states(); ++t) {
          const auto c = data.transition_count(s, a, b, t);
          if (c != 0) {
            trans << s << "," << a << "," << b << "," << t << "," << c << "\n";
          }
        }
      }
    }
  }
  WriteTextFile(prefix + ".pairs.csv", pairs.str());
  WriteTextFile(prefix + ".transitions.csv", trans.str());
  Json meta = metadata;
  meta["tool"] = ToolInfo();
  meta["num_states"] = data.num_states();
  meta["m"] = data.rows();
  meta["n"] = data.cols();
  meta["per_state"] = data.per_state();
  WriteJsonFile(prefix + ".json", meta);
}

MarkovDataset ReadMarkovDataset(const std::string& prefix) {
  const Json meta = ReadJsonFile(prefix + ".json");
  const std::string where = prefix + ".json";
  MarkovDataset data(Get<int>(meta, "num_states", where),
                     Get<int>(meta, "m", where), Get<int>(meta, "n", where));
  data.set_per_state(Get<std::int64_t>(meta, "per_state", where));
  const std::string path = prefix + ".transitions.csv";
  for (const auto& row : CsvRows(path, 5)) {
    const auto s = ParseInt(row[0], path), a = ParseInt(row[1], path),
               b = ParseInt(row[2], path), t = ParseInt(row[3], path),
               c = ParseInt(row[4], path);
    if (s < 0 || s >= data.num_states() || a < 0 || a >= data.rows() || b < 0 ||
        b >= data.cols() || t < 0 || t >= data.num_states() || c < 0) {
      throw IoError(path + ": index out of range");
    }
    for (std::int64_t i = 0; i < c; ++i) {
      data.Record(static_cast<int>(s), static_cast<int>(a),
                  static_cast<int>(b), static_cast<int>(t));
    }
  }
  return data;
}

void WriteMatrixSample(const MatrixSample& sample, const std::string& prefix,
                       const Json& metadata) {
  std::ostringstream csv;
  csv << "player,action,count\n";
  for (std::size_t a = 0; a < sample.counts_a.size(); ++a) {
    csv << "1," << a << "," << sample.counts_a[a] << "\n";
  }
  for (std::size_t b = 0; b < sample.counts_b.size(); ++b) {
    csv << "2," << b << "," << sample.counts_b[b] << "\n";
  }
  WriteTextFile(prefix + ".csv", csv.str());
  Json meta = metadata;
  meta["tool"] = ToolInfo();
  meta["m"] = sample.counts_a.size();
  meta["n"] = sample.counts_b.size();
  meta["total"] = sample.total;
  WriteJsonFile(prefix + ".json", meta);
}

MatrixSample ReadMatrixSample(const std::string& prefix) {
  const Json meta = ReadJsonFile(prefix + ".json");
  const std::string where = prefix + ".json";
  MatrixSample sample;
  sample.counts_a.assign(Get<std::size_t>(meta, "m", where), 0);
  sample.counts_b.assign(Get<std::size_t>(meta, "n", where), 0);
  sample.total = Get<std::int64_t>(meta, "total", where);
  const std::string path = prefix + ".csv";
  for (const auto& row : CsvRows(path, 3)) {
    const auto player = ParseInt(row[0], path);
    const auto action = ParseInt(row[1], path);
    const auto count = ParseInt(row[2], path);
    auto& counts = player == 1 ? sample.counts_a : sample.counts_b;
    if ((player != 1 && player != 2) || action < 0 ||
        action >= static_cast<std::int64_t>(counts.size()) || count < 0) {
      throw IoError(path + ": entry out of range");
    }
    counts[static_cast<std::size_t>(action)] = count;
  }
  return sample;
}

std::string SystemCsv(const LinearSystem& system) {
  std::ostringstream os;
  os << "state,block,row";
  for (Eigen::Index k = 0; k < system.x.cols(); ++k) os << ",x" << k;
  os << ",y\n";
  for (std::size_t s = 0; s < system.rows_mu.size(); ++s) {
    const std::pair<const char*, RowRange> blocks[] = {
        {"mu", system.rows_mu[s]}, {"nu", system.rows_nu[s]}};
    for (const auto& [name, range] : blocks) {
      for (Eigen::Index r = range.begin; r < range.end; ++r) {
        os << s << "," << name << "," << r;
        for (Eigen::Index k = 0; k < system.x.cols(); ++k) {
          os << "," << FormatDouble(system.x(r, k));
        }
        os << "," << FormatDouble(system.y[r]) << "\n";
      }
    }
  }
  return os.str();
}

std::string ConfidenceScanCsv(const std::vector<ConfidenceScanPoint>& points,
                              const Json& metadata) {
  std::ostringstream os;
  os << "# " << metadata.dump() << "\n";
  const Eigen::Index d = points.empty() ? 0 : points.front().theta.size();
  for (Eigen::Index k = 0; k < d; ++k) os << "theta" << k << ",";
  os << "tau,residual_sq,inside\n";
  for (const auto& p : points) {
    for (Eigen::Index k = 0; k < d; ++k) os << FormatDouble(p.theta[k]) << ",";
    os << FormatDouble(p.tau) << "," << FormatDouble(p.residual_sq) << ","
       << (p.inside ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return os.str();
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  out.flush();
  if (!out) throw IoError("error writing " + path);
}

Json ReadJsonFile(const std::string& path) {
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path + ": malformed JSON: " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const Json& j) {
  WriteTextFile(path, j.dump(2) + "\n");
}

}  // namespace qrinv
