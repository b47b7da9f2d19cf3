// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iostream>

#include "zolb/runner.hpp"

namespace zolb {

// Exit codes: 0 success, 1 audit found violations, 2 configuration error,
// 3 confidence slack exhausted in some replicate, 4 I/O error.
namespace exit_code {
constexpr int ok = 0;
constexpr int violations = 1;
constexpr int config = 2;
constexpr int slack_exhausted = 3;
constexpr int io = 4;
}  // namespace exit_code

namespace cli_detail {

inline int usage(std::ostream& os) {
  os << "usage:\n"
        "  zolb run <config> [--seed S] [--replicates R] [--jobs J] [--out DIR]\n"
        "  zolb sweep <config> --axis <eta|sigma|d> --values v1,v2,... [--jobs J] [--out DIR]\n"
        "  zolb audit <ledger.csv> --problem <name> [--geometry G]\n";
  return exit_code::config;
}

struct Args {
  std::vector<std::string> positional;
  std::map<std::string, std::string> flags;
};

inline Args parse_args(int argc, const char* const* argv, int start) {
  Args a;
  for (int i = start; i < argc; ++i) {
    std::string s = argv[i];
    if (s.rfind("--", 0) == 0) {
      if (i + 1 >= argc) throw ConfigError("missing value for flag " + s);
      a.flags[s.substr(2)] = argv[++i];
    } else {
      a.positional.push_back(std::move(s));
    }
  }
  return a;
}

inline std::vector<double> parse_value_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad value in list: " + tok);
    }
  }
  if (out.empty()) throw ConfigError("empty value list");
  return out;
}

inline void apply_overrides(RunConfig& rc, const Args& a) {
  if (auto it = a.flags.find("seed"); it != a.flags.end())
    rc.solver.seed = static_cast<std::uint64_t>(std::stoll(it->second));
  if (auto it = a.flags.find("replicates"); it != a.flags.end())
    rc.replicates = std::stoi(it->second);
  if (auto it = a.flags.find("jobs"); it != a.flags.end()) rc.jobs = std::stoi(it->second);
  if (auto it = a.flags.find("out"); it != a.flags.end()) rc.out_dir = it->second;
  if (rc.replicates < 1 || rc.jobs < 1) throw ConfigError("replicates and jobs must be >= 1");
}

inline int cmd_run(const Args& a, std::ostream& out, std::ostream& err) {
  if (a.positional.size() != 1) return usage(err);
  RunConfig rc = load_run_config(a.positional[0]);
  apply_overrides(rc, a);
  const ProblemSpec problem = build_problem(rc);

  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_replicates(problem, rc.solver, rc.replicates, rc.jobs);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const RunOutputs files = write_run_outputs(rc.out_dir, rc, problem, results, wall);
  std::uint64_t violations = 0;
  for (const auto& r : results) violations += r.violations.size();
  out << "replicates: " << results.size() << "\n"
      << "violations: " << violations << "\n"
      << "report: " << files.report_path.string() << "\n";
  return files.any_exhausted ? exit_code::slack_exhausted : exit_code::ok;
}

inline int cmd_sweep(const Args& a, std::ostream& out, std::ostream& err) {
  if (a.positional.size() != 1) return usage(err);
  auto ax_it = a.flags.find("axis");
  auto val_it = a.flags.find("values");
  if (ax_it == a.flags.end() || val_it == a.flags.end())
    throw ConfigError("sweep needs --axis and --values");
  RunConfig rc = load_run_config(a.positional[0]);
  apply_overrides(rc, a);
  const SweepAxis axis = sweep_axis_from_string(ax_it->second);
  const auto values = parse_value_list(val_it->second);

  const auto rows = run_sweep(rc, axis, values);
  std::error_code ec;
  std::filesystem::create_directories(rc.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + rc.out_dir);
  const auto path = std::filesystem::path(rc.out_dir) / ("sweep_" + ax_it->second + ".csv");
  auto os = open_output(path);
  write_sweep_csv(os, ax_it->second, rows);
  out << "sweep rows: " << rows.size() << "\n" << "csv: " << path.string() << "\n";
  return exit_code::ok;
}

inline int cmd_audit(const Args& a, std::ostream& out, std::ostream&) {
  if (a.positional.size() != 1) throw ConfigError("audit needs a ledger csv path");
  auto pb_it = a.flags.find("problem");
  if (pb_it == a.flags.end()) throw ConfigError("audit needs --problem <name>");
  RunConfig rc;
  rc.problem_name = pb_it->second;
  if (auto it = a.flags.find("geometry"); it != a.flags.end())
    rc.turning.geometry_constant = std::stod(it->second);
  const ProblemSpec problem = build_problem(rc);

  std::ifstream in(a.positional[0]);
  if (!in) throw IoError("cannot read ledger csv: " + a.positional[0]);
  int d = 0;
  const auto rows = read_ledger_csv(in, d);
  if (d != problem.dimension) throw ConfigError("ledger dimension does not match problem");

  std::uint64_t violations = 0;
  for (const auto& row : rows) {
    for (int i = 1; i <= problem.num_constraints; ++i) {
      const double v = problem.eval(i, row.x);
      if (v > 0.0) {
        ++violations;
        out << "violation t=" << row.t << " l=" << row.l << " constraint=" << i
            << " magnitude=" << format_double(v) << "\n";
      }
    }
  }
  out << "rows: " << rows.size() << "\nviolations: " << violations << "\n";
  return violations == 0 ? exit_code::ok : exit_code::violations;
}

}  // namespace cli_detail

/// Entry point shared by the binary and the tests.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  using namespace cli_detail;
  if (argc < 2) return usage(err);
  const std::string cmd = argv[1];
  try {
    const Args a = parse_args(argc, argv, 2);
    if (cmd == "run") return cmd_run(a, out, err);
    if (cmd == "sweep") return cmd_sweep(a, out, err);
    if (cmd == "audit") return cmd_audit(a, out, err);
    return usage(err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::config;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return exit_code::io;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::config;
  }
}

}  // namespace zolb
