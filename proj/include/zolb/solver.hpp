// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>

#include "zolb/barrier.hpp"

namespace zolb {

enum class OracleMode { exact, noisy };

struct SolverConfig {
  double eta0 = 0.1;       // initial barrier weight
  double mu = 5.0;         // annealing factor, eta_{k+1} = eta_k / mu
  int rounds = 1;          // K
  std::optional<std::int64_t> iterations;      // per-round cap T; empty = automatic budget
  std::optional<double> barrier_lower_bound;   // B_low used by the automatic budget
  double delta = 0.01;     // per-step confidence for the noisy oracle
  double sigma = 0.0;      // noise parameter
  OracleMode mode = OracleMode::exact;
  NoiseKind noise_kind = NoiseKind::gaussian;
  std::uint64_t seed = 0;
  double stop_score = 0.0;                     // early stop when gamma*||g||^2 <= this
  std::optional<double> initial_noisy_slack;   // noisy-constraint margin at the start point
  std::optional<std::uint64_t> max_measurements;  // soft budget, reported when exceeded
  LedgerPolicy ledger_policy = LedgerPolicy::retain;

  void validate() const {
    if (!(eta0 > 0.0)) throw std::invalid_argument("SolverConfig: eta0 must be > 0");
    if (!(mu > 1.0)) throw std::invalid_argument("SolverConfig: mu must be > 1");
    if (rounds < 1) throw std::invalid_argument("SolverConfig: rounds must be >= 1");
    if (iterations && *iterations < 1) throw std::invalid_argument("SolverConfig: iterations must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("SolverConfig: delta must be in (0,1)");
    if (sigma < 0.0) throw std::invalid_argument("SolverConfig: sigma must be >= 0");
    if (stop_score < 0.0) throw std::invalid_argument("SolverConfig: stop_score must be >= 0");
  }
};

struct IterateRecord {
  std::int64_t t = 0;       // global iteration index (continues across rounds)
  Vec x;
  double nu = 0.0;
  std::int64_t n = 1;
  double gamma = 0.0;
  Vec g;
  double gnorm = 0.0;
  double slack = 0.0;        // min margin over all constraints (step-size slack)
  double slack_noisy = 0.0;  // min margin over noisy constraints only
  Vec lambda;
  double barrier = 0.0;      // barrier value estimate at x
  double score = 0.0;        // gamma * ||g||^2, the selection quantity
  std::uint64_t cum_measurements = 0;
};

struct SubproblemResult {
  double eta = 0.0;
  std::vector<IterateRecord> trajectory;
  std::int64_t selected = -1;  // argmin of score, smallest index on ties
  bool slack_exhausted = false;
  bool budget_exceeded = false;
  bool early_stopped = false;

  const IterateRecord& selected_record() const {
    if (selected < 0) throw std::logic_error("subproblem produced no iterates");
    return trajectory[static_cast<std::size_t>(selected)];
  }
};

struct KKTReport {
  Vec x;
  Vec lambda;
  double eta = 0.0;
  double mode_constant = 1.0;  // 1 for the exact oracle, 4 for the noisy one
  double stationarity = 0.0;   // ||grad f0 + sum_i lambda_i grad f_i||_2
  double stationarity_threshold = 0.0;  // c*eta*(1+||lambda||_inf)
  std::vector<double> complementarity;  // lambda_i * (-f_i(x))
  bool dual_feasible = false;    // lambda_i >= 0
  bool primal_feasible = false;  // f_i(x) <= 0
  bool verdict = false;
  double min_slack_seen = 0.0;   // boundary-distance diagnostic over the run
  double max_lambda_inf = 0.0;   // observed bound on ||lambda_t||_inf
};

struct SolveResult {
  std::vector<SubproblemResult> rounds;
  KKTReport kkt;
  std::uint64_t total_measurements = 0;
  std::uint64_t expected_measurements = 0;  // sum over iterations of (d+1)*n_t
  double min_slack_seen = std::numeric_limits<double>::infinity();
  double max_lambda_inf = 0.0;
  bool slack_exhausted = false;
  int exhausted_round = -1;
  std::vector<Violation> violations;  // ground-truth audit of every query point
  double min_true_slack = std::numeric_limits<double>::infinity();
  double wall_seconds = 0.0;
  MeasurementLedger ledger{LedgerPolicy::streaming};

  const IterateRecord& final_selected() const {
    for (auto it = rounds.rbegin(); it != rounds.rend(); ++it)
      if (it->selected >= 0) return it->selected_record();
    throw std::logic_error("solve produced no iterates");
  }
};

/**
 * Iteration cap sufficient to reach the certified accuracy at barrier
 * weight eta, given a bound deltaB on the barrier gap B_eta(x0) - min B_eta:
 *   T = ceil( 2 * deltaB * max{ (m M eta + 4 L^2 m)/eta^3, L/eta^2 } ).
 */
inline std::int64_t iteration_budget(double eta, int m, double M, double L, double deltaB) {
  if (!(eta > 0.0) || m < 1 || !(M > 0.0) || !(L > 0.0))
    throw std::invalid_argument("iteration_budget: inputs must be positive");
  if (!(deltaB > 0.0)) throw std::invalid_argument("iteration_budget: barrier gap must be > 0");
  const double md = static_cast<double>(m);
  const double a = (md * M * eta + 4.0 * L * L * md) / (eta * eta * eta);
  const double b = L / (eta * eta);
  const double raw = 2.0 * deltaB * std::max(a, b);
  if (raw <= 1.0) return 1;
  return static_cast<std::int64_t>(std::ceil(raw));
}

/**
 * Verify an approximate scaled KKT certificate for (x, lambda) at level eta.
 * Uses analytic gradients when the problem provides them, otherwise an
 * independent high-accuracy central-difference pass on the true evaluators.
 * The accepted tolerance is c*eta with c = 1 for the exact oracle and c = 4
 * for the noisy one.
 */
inline KKTReport certify_kkt(const ProblemSpec& problem, const Vec& x, const Vec& lambda,
                             double eta, OracleMode mode) {
  const int d = problem.dimension;
  const int m = problem.num_constraints;
  if (lambda.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("certify_kkt: lambda has wrong size");

  auto grad_of = [&](int i) -> Vec {
    if (problem.has_analytic_gradients()) return problem.gradient(i, x);
    // central differences on the ground-truth evaluators, independent of the
    // solver's one-sided estimator path
    Vec g(static_cast<std::size_t>(d));
    Vec p = x;
    for (int j = 0; j < d; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[static_cast<std::size_t>(j)]));
      p[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + h;
      const double fp = problem.eval(i, p);
      p[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] - h;
      const double fm = problem.eval(i, p);
      p[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  KKTReport rep;
  rep.x = x;
  rep.lambda = lambda;
  rep.eta = eta;
  rep.mode_constant = (mode == OracleMode::exact) ? 1.0 : 4.0;

  Vec grad_lagrangian = grad_of(0);
  rep.dual_feasible = true;
  rep.primal_feasible = true;
  rep.complementarity.resize(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    const double li = lambda[static_cast<std::size_t>(i - 1)];
    const double fi = problem.eval(i, x);
    if (li < 0.0) rep.dual_feasible = false;
    if (fi > 0.0) rep.primal_feasible = false;
    rep.complementarity[static_cast<std::size_t>(i - 1)] = li * (-fi);
    axpy(li, grad_of(i), grad_lagrangian);
  }
  rep.stationarity = norm2(grad_lagrangian);
  rep.stationarity_threshold = rep.mode_constant * eta * (1.0 + norm_inf(lambda));

  constexpr double fp_slop = 1.0 + 1e-12;
  bool comp_ok = true;
  for (double c : rep.complementarity)
    if (c > rep.mode_constant * eta * fp_slop) comp_ok = false;
  rep.verdict = rep.dual_feasible && rep.primal_feasible && comp_ok &&
                rep.stationarity <= rep.stationarity_threshold * fp_slop;
  return rep;
}

namespace detail {

struct IterationScratch {
  Vec vals;          // m+1 values from one oracle call
  Vec center_vals;   // replicate-local center values
  Vec center_mean;   // running mean of center values per function
  std::vector<Vec> grad_sum;  // per function index, per coordinate
  Vec probe;
};

/// Minimum margin of the exactly-known constraints scaled by their own
/// Lipschitz constants; probes shorter than this cannot cross them.
inline double exact_probe_cap(const ProblemSpec& p, std::span<const double> constraint_values) {
  double cap = std::numeric_limits<double>::infinity();
  for (int c = 0; c < p.num_constraints; ++c) {
    if (!p.exact_constraint(c)) continue;
    cap = std::min(cap, -constraint_values[static_cast<std::size_t>(c)] / p.constraint_lip(c));
  }
  return cap;
}

}  // namespace detail

/**
 * Run one barrier subproblem (fixed eta) from x_start for up to T iterations.
 *
 * Per iteration: pick the probe radius nu_t (bias cap, feasibility cap from
 * the previous iterate's confidence margins, and the exactly-known-constraint
 * cap), average n_t replicates of the forward-difference estimator for every
 * function index from (d+1)*n_t oracle calls, form upper confidence bounds
 * for the noisy constraints, assemble the barrier gradient and the local
 * smoothness bound, take the adaptive safe step, and log everything. Returns
 * the trajectory and the index minimizing gamma_t*||g_t||^2.
 *
 * Exhausted confidence slack (no strictly-negative margin certifiable) stops
 * the subproblem and flags the result rather than throwing.
 */
inline SubproblemResult solve_subproblem(Oracle& oracle, const SolverConfig& cfg, double eta,
                                         Vec x_start, std::int64_t iterations,
                                         std::int64_t& global_t, double& carried_noisy_slack) {
  const ProblemSpec& p = oracle.problem();
  const int d = p.dimension;
  const int m = p.num_constraints;
  const bool noisy = cfg.mode == OracleMode::noisy;
  const double M = p.smoothness;
  const double L = p.lipschitz;

  int m_noisy = 0;
  for (int c = 0; c < m; ++c)
    if (!p.exact_constraint(c)) ++m_noisy;

  SubproblemResult res;
  res.eta = eta;

  detail::IterationScratch ws;
  ws.vals.resize(static_cast<std::size_t>(m + 1));
  ws.center_vals.resize(static_cast<std::size_t>(m + 1));
  ws.center_mean.resize(static_cast<std::size_t>(m + 1));
  ws.grad_sum.assign(static_cast<std::size_t>(m + 1), Vec(static_cast<std::size_t>(d), 0.0));
  ws.probe.resize(static_cast<std::size_t>(d));

  Vec x = std::move(x_start);
  Vec values(static_cast<std::size_t>(m));  // barrier inputs: true values or UCBs

  for (std::int64_t it = 0; it < iterations; ++it, ++global_t) {
    // First call of the batch establishes the current exact/true values.
    oracle.measure_all(x, noisy, global_t, 0, ws.vals);

    double nu = 0.0;
    std::int64_t n = 1;
    if (!noisy) {
      double slack_true = std::numeric_limits<double>::infinity();
      for (int c = 0; c < m; ++c)
        slack_true = std::min(slack_true, -ws.vals[static_cast<std::size_t>(c + 1)]);
      if (!(slack_true > 0.0)) {
        res.slack_exhausted = true;
        break;
      }
      nu = probe_radius(eta, d, M, L, m, slack_true, false);
    } else {
      const double cap = detail::exact_probe_cap(
          p, std::span<const double>(ws.vals).subspan(1));
      if (!(cap > 0.0) || !(carried_noisy_slack > 0.0)) {
        res.slack_exhausted = true;
        break;
      }
      nu = m_noisy > 0 ? probe_radius(eta, d, M, L, m_noisy, carried_noisy_slack, true)
                       : eta / (std::sqrt(static_cast<double>(d)) * M);
      nu = std::min(nu, cap);
      n = batch_size(nu, cfg.sigma, cfg.delta, M);
    }

    // Replicate 0: center already measured; probes pair with it.
    std::copy(ws.vals.begin(), ws.vals.end(), ws.center_vals.begin());
    std::copy(ws.vals.begin(), ws.vals.end(), ws.center_mean.begin());
    for (auto& gs : ws.grad_sum) std::fill(gs.begin(), gs.end(), 0.0);
    std::copy(x.begin(), x.end(), ws.probe.begin());
    for (std::int64_t l = 0; l < n; ++l) {
      if (l > 0) {
        oracle.measure_all(x, noisy, global_t, l, ws.center_vals);
        for (int i = 0; i <= m; ++i)
          ws.center_mean[static_cast<std::size_t>(i)] += ws.center_vals[static_cast<std::size_t>(i)];
      }
      for (int j = 0; j < d; ++j) {
        ws.probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + nu;
        oracle.measure_all(ws.probe, noisy, global_t, l, ws.vals);
        ws.probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
        for (int i = 0; i <= m; ++i)
          ws.grad_sum[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
              (ws.vals[static_cast<std::size_t>(i)] - ws.center_vals[static_cast<std::size_t>(i)]) / nu;
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int i = 0; i <= m; ++i) {
      ws.center_mean[static_cast<std::size_t>(i)] *= inv_n;
      for (double& gj : ws.grad_sum[static_cast<std::size_t>(i)]) gj *= inv_n;
    }

    // Constraint values entering the barrier: true values (exact oracle) or
    // upper confidence bounds (noisy oracle; exactly-known constraints keep
    // their exact values).
    double slack_noisy = std::numeric_limits<double>::infinity();
    for (int c = 0; c < m; ++c) {
      const double mean = ws.center_mean[static_cast<std::size_t>(c + 1)];
      if (!noisy || p.exact_constraint(c)) {
        values[static_cast<std::size_t>(c)] = mean;
      } else {
        values[static_cast<std::size_t>(c)] = ucb_from_mean(mean, n, cfg.sigma, cfg.delta).upper;
      }
      if (!p.exact_constraint(c))
        slack_noisy = std::min(slack_noisy, -values[static_cast<std::size_t>(c)]);
    }
    double slack = std::numeric_limits<double>::infinity();
    for (double v : values) slack = std::min(slack, -v);
    if (!(slack > 0.0)) {
      res.slack_exhausted = true;
      break;
    }

    Vec g = ws.grad_sum[0];
    for (int c = 0; c < m; ++c)
      axpy(eta / (-values[static_cast<std::size_t>(c)]), ws.grad_sum[static_cast<std::size_t>(c + 1)], g);
    const double gnorm = norm2(g);
    const double L2 = local_smoothness(values, eta, M, L);
    const double gamma = step_size(slack, L, gnorm, L2);

    IterateRecord rec;
    rec.t = global_t;
    rec.x = x;
    rec.nu = nu;
    rec.n = n;
    rec.gamma = gamma;
    rec.gnorm = gnorm;
    rec.slack = slack;
    rec.slack_noisy = (m_noisy > 0) ? slack_noisy : slack;
    rec.lambda.resize(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c)
      rec.lambda[static_cast<std::size_t>(c)] = eta / (-values[static_cast<std::size_t>(c)]);
    rec.barrier = barrier_value(ws.center_mean[0], values, eta);
    rec.score = gamma * gnorm * gnorm;
    rec.cum_measurements = oracle.ledger().size();
    rec.g = std::move(g);

    carried_noisy_slack = rec.slack_noisy;
    res.trajectory.push_back(std::move(rec));
    const IterateRecord& r = res.trajectory.back();

    if (r.score <= cfg.stop_score) {
      res.early_stopped = true;
      ++global_t;
      break;
    }
    if (cfg.max_measurements && oracle.ledger().size() >= *cfg.max_measurements) {
      res.budget_exceeded = true;
      ++global_t;
      break;
    }
    axpy(-gamma, r.g, x);
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
    if (res.trajectory[i].score < best) {
      best = res.trajectory[i].score;
      res.selected = static_cast<std::int64_t>(i);
    }
  }
  return res;
}

/**
 * Estimate of the barrier gap B_eta(x_start) - B_low used by the automatic
 * iteration budget. B_low comes from the config when provided, otherwise
 * from a coarse feasible grid sample over the problem's box.
 */
inline double barrier_gap_estimate(const ProblemSpec& p, const SolverConfig& cfg, double eta,
                                   const Vec& x_start) {
  Vec cv(static_cast<std::size_t>(p.num_constraints));
  for (int i = 1; i <= p.num_constraints; ++i)
    cv[static_cast<std::size_t>(i - 1)] = p.eval(i, x_start);
  const double b_start = barrier_value(p.eval(0, x_start), cv, eta);

  double b_low;
  if (cfg.barrier_lower_bound) {
    b_low = *cfg.barrier_lower_bound;
  } else {
    if (!p.has_box() || p.dimension > 3)
      throw std::invalid_argument(
          "automatic iteration budget needs a barrier_lower_bound or a boxed problem with d <= 3");
    // coarse grid: min feasible objective minus the worst-case log terms
    const int steps = 24;
    double fmin = std::numeric_limits<double>::infinity();
    double slack_max = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(p.dimension), 0);
    Vec pt(static_cast<std::size_t>(p.dimension));
    bool done = false;
    while (!done) {
      for (int j = 0; j < p.dimension; ++j) {
        const double a = p.box_lower[static_cast<std::size_t>(j)];
        const double b = p.box_upper[static_cast<std::size_t>(j)];
        pt[static_cast<std::size_t>(j)] =
            a + (b - a) * (static_cast<double>(idx[static_cast<std::size_t>(j)]) + 0.5) / steps;
      }
      double worst = -std::numeric_limits<double>::infinity();
      for (int i = 1; i <= p.num_constraints; ++i) worst = std::max(worst, p.eval(i, pt));
      if (worst <= 0.0) {
        fmin = std::min(fmin, p.eval(0, pt));
        slack_max = std::max(slack_max, -worst);
      }
      done = true;
      for (int j = 0; j < p.dimension; ++j) {
        if (++idx[static_cast<std::size_t>(j)] < steps) {
          done = false;
          break;
        }
        idx[static_cast<std::size_t>(j)] = 0;
      }
    }
    if (!std::isfinite(fmin))
      throw std::invalid_argument("automatic iteration budget: no feasible grid sample");
    b_low = fmin - eta * p.num_constraints * std::log(std::max(2.0, 2.0 * slack_max));
  }
  return std::max(b_start - b_low, 1e-6);
}

/**
 * Full annealed run: solve the barrier subproblem for eta0, eta0/mu, ...,
 * warm-starting each round at the previous round's selected iterate, then
 * certify the final selected pair (x_k, lambda_k) at the final eta.
 */
inline SolveResult solve(const ProblemSpec& problem, const SolverConfig& cfg) {
  problem.validate();
  cfg.validate();
  const auto t_begin = std::chrono::steady_clock::now();

  Oracle oracle(problem, NoiseModel{cfg.sigma, cfg.seed, cfg.noise_kind, {}}, cfg.ledger_policy);

  SolveResult out;
  Vec x = problem.start;
  std::int64_t global_t = 0;

  // Noisy-constraint margin at the start point, for the first probe radius.
  // The start point is assumed known-feasible, so its margin is taken from
  // the config or from ground truth.
  double carried_noisy_slack = std::numeric_limits<double>::infinity();
  if (cfg.mode == OracleMode::noisy) {
    if (cfg.initial_noisy_slack) {
      carried_noisy_slack = *cfg.initial_noisy_slack;
    } else {
      carried_noisy_slack = std::numeric_limits<double>::infinity();
      for (int c = 0; c < problem.num_constraints; ++c)
        if (!problem.exact_constraint(c))
          carried_noisy_slack = std::min(carried_noisy_slack, -problem.eval(c + 1, problem.start));
    }
  }

  double eta = cfg.eta0;
  for (int k = 0; k < cfg.rounds; ++k) {
    const std::int64_t T = cfg.iterations
                               ? *cfg.iterations
                               : iteration_budget(eta, problem.num_constraints, problem.smoothness,
                                                  problem.lipschitz,
                                                  barrier_gap_estimate(problem, cfg, eta, x));
    SubproblemResult r = solve_subproblem(oracle, cfg, eta, x, T, global_t, carried_noisy_slack);
    const bool dead_end = r.selected < 0;
    if (r.slack_exhausted) {
      out.slack_exhausted = true;
      out.exhausted_round = k;
    }
    out.rounds.push_back(std::move(r));
    if (dead_end) break;
    const IterateRecord& sel = out.rounds.back().selected_record();
    x = sel.x;
    carried_noisy_slack = sel.slack_noisy;
    if (out.slack_exhausted) break;
    eta /= cfg.mu;
  }

  std::uint64_t expected = 0;
  for (const auto& r : out.rounds)
    for (const auto& rec : r.trajectory) {
      expected += static_cast<std::uint64_t>(rec.n) * static_cast<std::uint64_t>(problem.dimension + 1);
      out.min_slack_seen = std::min(out.min_slack_seen, rec.slack);
      out.max_lambda_inf = std::max(out.max_lambda_inf, norm_inf(rec.lambda));
    }
  out.expected_measurements = expected;
  out.total_measurements = oracle.ledger().size();

  bool any = false;
  for (const auto& r : out.rounds)
    if (r.selected >= 0) any = true;
  if (any) {
    const IterateRecord& sel = out.final_selected();
    double final_eta = cfg.eta0;
    for (auto it = out.rounds.rbegin(); it != out.rounds.rend(); ++it)
      if (it->selected >= 0) {
        final_eta = it->eta;
        break;
      }
    out.kkt = certify_kkt(problem, sel.x, sel.lambda, final_eta, cfg.mode);
    out.kkt.min_slack_seen = out.min_slack_seen;
    out.kkt.max_lambda_inf = out.max_lambda_inf;
  }

  out.min_true_slack = oracle.ledger().min_true_slack();
  out.ledger = oracle.take_ledger();
  out.violations = audit_safety(out.ledger, problem);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return out;
}

}  // namespace zolb
