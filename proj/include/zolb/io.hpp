// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include <json.hpp>

#include "zolb/config.hpp"

namespace zolb {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write file: " + path.string());
  return os;
}

inline void write_trajectory_csv(std::ostream& os, const SolveResult& res, int dimension) {
  os << "t";
  for (int j = 1; j <= dimension; ++j) os << ",x_" << j;
  os << ",nu,n,gamma,gnorm,slack,barrier,score,cum_measurements\n";
  for (const auto& round : res.rounds) {
    for (const auto& r : round.trajectory) {
      os << r.t;
      for (double c : r.x) os << ',' << format_double(c);
      os << ',' << format_double(r.nu) << ',' << r.n << ',' << format_double(r.gamma) << ','
         << format_double(r.gnorm) << ',' << format_double(r.slack) << ','
         << format_double(r.barrier) << ',' << format_double(r.score) << ','
         << r.cum_measurements << '\n';
    }
  }
}

/// Plot-ready data: true objective per iterate, one row per (replicate, t).
inline void write_objective_csv(std::ostream& os, const ProblemSpec& p,
                                std::span<const SolveResult> results) {
  os << "replicate,t,objective\n";
  for (std::size_t r = 0; r < results.size(); ++r)
    for (const auto& round : results[r].rounds)
      for (const auto& rec : round.trajectory)
        os << r << ',' << rec.t << ',' << format_double(p.eval(0, rec.x)) << '\n';
}

/// Plot-ready data: true distance to the constraint boundary min_i(-f_i).
inline void write_boundary_csv(std::ostream& os, const ProblemSpec& p,
                               std::span<const SolveResult> results) {
  os << "replicate,t,boundary_distance\n";
  for (std::size_t r = 0; r < results.size(); ++r)
    for (const auto& round : results[r].rounds)
      for (const auto& rec : round.trajectory)
        os << r << ',' << rec.t << ',' << format_double(p.true_slack(rec.x)) << '\n';
}

inline void write_trajectory2d_csv(std::ostream& os, std::span<const SolveResult> results) {
  os << "replicate,t,x_1,x_2\n";
  for (std::size_t r = 0; r < results.size(); ++r)
    for (const auto& round : results[r].rounds)
      for (const auto& rec : round.trajectory)
        os << r << ',' << rec.t << ',' << format_double(rec.x[0]) << ','
           << format_double(rec.x[1]) << '\n';
}

inline void write_audit_csv(std::ostream& os, std::span<const SolveResult> results,
                            int dimension) {
  os << "replicate,entry,t,l,constraint,magnitude";
  for (int j = 1; j <= dimension; ++j) os << ",x_" << j;
  os << '\n';
  for (std::size_t r = 0; r < results.size(); ++r) {
    for (const Violation& v : results[r].violations) {
      os << r << ',' << v.entry << ',' << v.t << ',' << v.l << ',' << v.constraint << ','
         << format_double(v.magnitude);
      for (double c : v.x) os << ',' << format_double(c);
      os << '\n';
    }
  }
}

inline nlohmann::json kkt_to_json(const KKTReport& k) {
  return {
      {"x", k.x},
      {"lambda", k.lambda},
      {"eta", k.eta},
      {"mode_constant", k.mode_constant},
      {"stationarity", k.stationarity},
      {"stationarity_threshold", k.stationarity_threshold},
      {"complementarity", k.complementarity},
      {"dual_feasible", k.dual_feasible},
      {"primal_feasible", k.primal_feasible},
      {"verdict", k.verdict},
      {"min_slack_seen", k.min_slack_seen},
      {"max_lambda_inf", k.max_lambda_inf},
  };
}

inline nlohmann::json result_to_json(const ProblemSpec& p, const SolveResult& res) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : res.rounds) {
    nlohmann::json jr = {
        {"eta", r.eta},
        {"iterations", r.trajectory.size()},
        {"selected", r.selected},
        {"slack_exhausted", r.slack_exhausted},
        {"budget_exceeded", r.budget_exceeded},
        {"early_stopped", r.early_stopped},
    };
    if (r.selected >= 0) {
      const auto& sel = r.selected_record();
      jr["selected_iterate"] = {{"t", sel.t},       {"x", sel.x},
                                {"objective", p.eval(0, sel.x)}, {"slack", sel.slack},
                                {"gnorm", sel.gnorm},            {"score", sel.score},
                                {"lambda", sel.lambda}};
    }
    rounds.push_back(std::move(jr));
  }
  return {
      {"problem", p.name},
      {"rounds", rounds},
      {"kkt", kkt_to_json(res.kkt)},
      {"measurements", res.total_measurements},
      {"expected_measurements", res.expected_measurements},
      {"min_slack_seen", res.min_slack_seen},
      {"min_true_slack", res.min_true_slack},
      {"max_lambda_inf", res.max_lambda_inf},
      {"slack_exhausted", res.slack_exhausted},
      {"exhausted_round", res.exhausted_round},
      {"violations", res.violations.size()},
      {"wall_seconds", res.wall_seconds},
  };
}

struct RunOutputs {
  std::filesystem::path report_path;
  bool any_violation = false;
  bool any_exhausted = false;
};

/**
 * Write the full output set for a replicated run: per-replicate trajectory
 * CSVs, the aggregate JSON report, the safety-audit CSV, plot-data CSVs,
 * and (on request) per-replicate ledger exports.
 */
inline RunOutputs write_run_outputs(const std::filesystem::path& dir, const RunConfig& rc,
                                    const ProblemSpec& p, std::span<const SolveResult> results,
                                    double wall_seconds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());

  RunOutputs out;
  for (std::size_t r = 0; r < results.size(); ++r) {
    auto os = open_output(dir / ("trajectory_r" + std::to_string(r) + ".csv"));
    write_trajectory_csv(os, results[r], p.dimension);
    if (rc.export_ledger && results[r].ledger.retained()) {
      auto ls = open_output(dir / ("ledger_r" + std::to_string(r) + ".csv"));
      write_ledger_csv(ls, results[r].ledger, &p, p.dimension);
    }
  }
  {
    auto os = open_output(dir / "audit.csv");
    write_audit_csv(os, results, p.dimension);
  }
  if (rc.write_plots) {
    {
      auto os = open_output(dir / "objective_vs_iteration.csv");
      write_objective_csv(os, p, results);
    }
    {
      auto os = open_output(dir / "boundary_distance.csv");
      write_boundary_csv(os, p, results);
    }
    if (p.dimension == 2) {
      auto os = open_output(dir / "trajectory_2d.csv");
      write_trajectory2d_csv(os, results);
    }
  }

  nlohmann::json jreps = nlohmann::json::array();
  std::uint64_t total_violations = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    jreps.push_back(result_to_json(p, results[r]));
    total_violations += results[r].violations.size();
    if (results[r].slack_exhausted) out.any_exhausted = true;
  }
  out.any_violation = total_violations > 0;

  nlohmann::json report = {
      {"config", rc.echo},
      {"problem", p.name},
      {"replicates", results.size()},
      {"total_violations", total_violations},
      {"any_slack_exhausted", out.any_exhausted},
      {"wall_seconds", wall_seconds},
      {"runs", jreps},
      {"files",
       {{"trajectory", "trajectory_r<k>.csv"},
        {"audit", "audit.csv"},
        {"objective", "objective_vs_iteration.csv"},
        {"boundary", "boundary_distance.csv"}}},
  };
  out.report_path = dir / "report.json";
  auto os = open_output(out.report_path);
  os << report.dump(2) << '\n';
  return out;
}

/// Parse a ledger CSV (as written by write_ledger_csv) back into query rows.
struct LedgerRow {
  std::int64_t t = 0, l = 0;
  int index = 0;
  Vec x;
  double value = 0.0;
};

inline std::vector<LedgerRow> read_ledger_csv(std::istream& in, int& dimension) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("ledger csv: missing header");
  int d = 0;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ','))
      if (col.rfind("x_", 0) == 0) ++d;
  }
  if (d == 0) throw IoError("ledger csv: no x_ columns in header");
  dimension = d;
  std::vector<LedgerRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    LedgerRow row;
    auto next = [&]() {
      if (!std::getline(ss, cell, ',')) throw IoError("ledger csv: short row");
      return cell;
    };
    row.t = std::stoll(next());
    row.l = std::stoll(next());
    row.index = std::stoi(next());
    row.x.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) row.x[static_cast<std::size_t>(j)] = std::stod(next());
    row.value = std::stod(next());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace zolb
