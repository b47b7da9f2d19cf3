// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "zolb/problems.hpp"
#include "zolb/solver.hpp"

namespace zolb {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` file with dotted keys; '#' starts a comment.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

class ConfigMap {
 public:
  explicit ConfigMap(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  static ConfigMap from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    return ConfigMap(parse_key_values(in));
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not a number: " + it->second);
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t used = 0;
      const std::int64_t v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not an integer: " + it->second);
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false: " + it->second);
  }

  const std::map<std::string, std::string>& raw() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct RunConfig {
  std::string problem_name = "turning";
  TurningConfig turning;
  int random_dimension = 2;
  int random_constraints = 2;
  std::uint64_t random_seed = 1;
  std::optional<double> override_smoothness;
  std::optional<double> override_lipschitz;

  SolverConfig solver;
  int replicates = 1;
  int jobs = 1;
  std::string out_dir = "out";
  bool export_ledger = false;
  bool write_plots = true;

  std::map<std::string, std::string> echo;  // raw keys, reproduced in the report
};

inline RunConfig run_config_from_map(const ConfigMap& cm) {
  RunConfig rc;
  rc.echo = cm.raw();
  rc.problem_name = cm.get_string("problem.name", rc.problem_name);

  rc.turning.geometry_constant = cm.get_double("problem.geometry_constant", rc.turning.geometry_constant);
  rc.turning.roughness_limit = cm.get_double("problem.roughness_limit", rc.turning.roughness_limit);
  rc.random_dimension = static_cast<int>(cm.get_int("problem.dimension", rc.random_dimension));
  rc.random_constraints = static_cast<int>(cm.get_int("problem.constraints", rc.random_constraints));
  rc.random_seed = static_cast<std::uint64_t>(cm.get_int("problem.seed", static_cast<std::int64_t>(rc.random_seed)));
  if (cm.has("problem.smoothness")) rc.override_smoothness = cm.get_double("problem.smoothness", 0.0);
  if (cm.has("problem.lipschitz")) rc.override_lipschitz = cm.get_double("problem.lipschitz", 0.0);

  rc.solver.eta0 = cm.get_double("solver.eta0", rc.solver.eta0);
  rc.solver.mu = cm.get_double("solver.mu", rc.solver.mu);
  rc.solver.rounds = static_cast<int>(cm.get_int("solver.rounds", rc.solver.rounds));
  const std::string iters = cm.get_string("solver.iterations", "auto");
  if (iters != "auto") {
    ConfigMap tmp(std::map<std::string, std::string>{{"solver.iterations", iters}});
    rc.solver.iterations = tmp.get_int("solver.iterations", 0);
  }
  if (cm.has("solver.b_low")) rc.solver.barrier_lower_bound = cm.get_double("solver.b_low", 0.0);
  rc.solver.delta = cm.get_double("solver.delta", rc.solver.delta);
  rc.solver.sigma = cm.get_double("solver.sigma", rc.solver.sigma);
  const std::string mode = cm.get_string("solver.mode", "ezo");
  if (mode == "ezo" || mode == "exact")
    rc.solver.mode = OracleMode::exact;
  else if (mode == "szo" || mode == "noisy")
    rc.solver.mode = OracleMode::noisy;
  else
    throw ConfigError("solver.mode must be ezo or szo, got: " + mode);
  const std::string noise = cm.get_string("solver.noise", "gaussian");
  if (noise == "gaussian")
    rc.solver.noise_kind = NoiseKind::gaussian;
  else if (noise == "uniform")
    rc.solver.noise_kind = NoiseKind::uniform;
  else
    throw ConfigError("solver.noise must be gaussian or uniform, got: " + noise);
  rc.solver.seed = static_cast<std::uint64_t>(cm.get_int("solver.seed", 0));
  rc.solver.stop_score = cm.get_double("solver.stop_score", rc.solver.stop_score);
  if (cm.has("solver.initial_slack"))
    rc.solver.initial_noisy_slack = cm.get_double("solver.initial_slack", 0.0);
  if (cm.has("solver.max_measurements"))
    rc.solver.max_measurements = static_cast<std::uint64_t>(cm.get_int("solver.max_measurements", 0));

  rc.replicates = static_cast<int>(cm.get_int("run.replicates", rc.replicates));
  rc.jobs = static_cast<int>(cm.get_int("run.jobs", rc.jobs));
  if (const char* env = std::getenv("ZOLB_OUT"); env != nullptr && *env != '\0') rc.out_dir = env;
  rc.out_dir = cm.get_string("run.out", rc.out_dir);
  rc.export_ledger = cm.get_bool("out.ledger", rc.export_ledger);
  rc.write_plots = cm.get_bool("out.plots", rc.write_plots);

  if (rc.replicates < 1) throw ConfigError("run.replicates must be >= 1");
  if (rc.jobs < 1) throw ConfigError("run.jobs must be >= 1");
  rc.solver.ledger_policy = rc.export_ledger ? LedgerPolicy::retain : LedgerPolicy::streaming;
  try {
    rc.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  return run_config_from_map(ConfigMap::from_file(path));
}

inline ProblemSpec build_problem(const RunConfig& rc) {
  ProblemSpec p;
  if (rc.problem_name == "turning") {
    TurningConfig tc = rc.turning;
    if (rc.override_smoothness) tc.smoothness = *rc.override_smoothness;
    if (rc.override_lipschitz) tc.lipschitz = *rc.override_lipschitz;
    p = make_turning_problem(tc);
  } else if (rc.problem_name == "linear1d") {
    p = make_linear1d();
  } else if (rc.problem_name == "disk_quadratic") {
    p = make_disk_quadratic();
  } else if (rc.problem_name == "random") {
    p = make_random_instance(rc.random_dimension, rc.random_constraints, rc.random_seed,
                             rc.override_smoothness.value_or(2.0),
                             rc.override_lipschitz.value_or(6.0));
  } else {
    throw ConfigError("unknown problem.name: " + rc.problem_name);
  }
  if (rc.problem_name != "random") {
    if (rc.override_smoothness) p.smoothness = *rc.override_smoothness;
    if (rc.override_lipschitz) p.lipschitz = *rc.override_lipschitz;
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

}  // namespace zolb
