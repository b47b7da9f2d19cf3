// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <mutex>
#include <thread>

#include "zolb/io.hpp"

namespace zolb {

/**
 * Execute R independent replicates of solve(), replicate r seeded with
 * mix_seed(base seed, r). Replicates own their oracle and RNG stream, so
 * running them across threads changes nothing about any single result;
 * outputs are merged in replicate order.
 */
inline std::vector<SolveResult> run_replicates(const ProblemSpec& problem,
                                               const SolverConfig& base, int replicates,
                                               int jobs) {
  std::vector<SolveResult> results(static_cast<std::size_t>(replicates));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= replicates || failed.load()) break;
      SolverConfig cfg = base;
      cfg.seed = mix_seed(base.seed, static_cast<std::uint64_t>(r));
      try {
        results[static_cast<std::size_t>(r)] = solve(problem, cfg);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };

  const int nthreads = std::max(1, std::min(jobs, replicates));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("replicate failed: " + first_error);
  return results;
}

struct SweepRow {
  double axis_value = 0.0;
  int replicate = 0;
  std::uint64_t measurements = 0;
  double min_slack = 0.0;
  double kkt_residual = 0.0;
};

enum class SweepAxis { eta, sigma, dimension };

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "eta") return SweepAxis::eta;
  if (s == "sigma") return SweepAxis::sigma;
  if (s == "d" || s == "dimension") return SweepAxis::dimension;
  throw ConfigError("sweep axis must be one of eta, sigma, d");
}

/// Run the (axis value x replicate) matrix and collect one row per run.
inline std::vector<SweepRow> run_sweep(const RunConfig& rc, SweepAxis axis,
                                       std::span<const double> values) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    RunConfig cfg = rc;
    switch (axis) {
      case SweepAxis::eta:
        if (!(v > 0.0)) throw ConfigError("sweep: eta values must be > 0");
        cfg.solver.eta0 = v;
        break;
      case SweepAxis::sigma:
        if (v < 0.0) throw ConfigError("sweep: sigma values must be >= 0");
        cfg.solver.sigma = v;
        break;
      case SweepAxis::dimension: {
        if (v < 1.0 || v != std::floor(v)) throw ConfigError("sweep: d values must be positive integers");
        cfg.problem_name = "random";
        cfg.random_dimension = static_cast<int>(v);
        break;
      }
    }
    const ProblemSpec problem = build_problem(cfg);
    const auto results = run_replicates(problem, cfg.solver, cfg.replicates, cfg.jobs);
    for (std::size_t r = 0; r < results.size(); ++r) {
      SweepRow row;
      row.axis_value = v;
      row.replicate = static_cast<int>(r);
      row.measurements = results[r].total_measurements;
      row.min_slack = results[r].min_slack_seen;
      row.kkt_residual = results[r].kkt.stationarity;
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::string& axis,
                            std::span<const SweepRow> rows) {
  os << axis << ",replicate,measurements,min_slack,kkt_residual\n";
  for (const auto& r : rows)
    os << format_double(r.axis_value) << ',' << r.replicate << ',' << r.measurements << ','
       << format_double(r.min_slack) << ',' << format_double(r.kkt_residual) << '\n';
}

}  // namespace zolb
