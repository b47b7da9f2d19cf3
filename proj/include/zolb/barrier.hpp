// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "zolb/estimator.hpp"

namespace zolb {

namespace detail {
inline void require_strictly_negative(std::span<const double> constraint_values,
                                      const char* where) {
  for (double v : constraint_values)
    if (!(v < 0.0)) throw std::domain_error(std::string(where) + ": constraint value not < 0");
}
}  // namespace detail

/// B_eta(x) = f0 - eta * sum_i log(-f_i); defined only for f_i < 0.
inline double barrier_value(double objective_value, std::span<const double> constraint_values,
                            double eta) {
  detail::require_strictly_negative(constraint_values, "barrier_value");
  double s = 0.0;
  for (double v : constraint_values) s += std::log(-v);
  return objective_value - eta * s;
}

/**
 * Barrier-gradient estimate g = G0 + eta * sum_i G_i / (-v_i), where v_i is
 * the true constraint value (exact oracle) or its upper confidence bound
 * (noisy oracle).
 */
inline Vec barrier_gradient(const Vec& objective_estimate,
                            std::span<const Vec> constraint_estimates,
                            std::span<const double> constraint_values, double eta) {
  detail::require_strictly_negative(constraint_values, "barrier_gradient");
  if (constraint_estimates.size() != constraint_values.size())
    throw std::invalid_argument("barrier_gradient: estimate/value count mismatch");
  Vec g = objective_estimate;
  for (std::size_t i = 0; i < constraint_estimates.size(); ++i)
    axpy(eta / (-constraint_values[i]), constraint_estimates[i], g);
  return g;
}

/// Local smoothness bound of the barrier gradient:
///   L2 = M + sum_i [ 2 eta M / (-v_i) + 4 eta L^2 / (-v_i)^2 ].
inline double local_smoothness(std::span<const double> constraint_values, double eta, double M,
                               double L) {
  detail::require_strictly_negative(constraint_values, "local_smoothness");
  double s = M;
  for (double v : constraint_values) {
    const double slack = -v;
    s += 2.0 * eta * M / slack + 4.0 * eta * L * L / (slack * slack);
  }
  return s;
}

/**
 * Probe radius for the finite-difference measurements around the current
 * iterate. The first branch controls the estimator bias, the second keeps
 * the probe points feasible:
 *
 *   exact oracle:  nu = min( eta/(sqrt(d) M), alpha /      max{L, m sqrt(d) M} )
 *   noisy oracle:  nu = min( eta/(sqrt(d) M), alpha / (2 * max{L, m sqrt(d) M}) )
 *
 * where alpha is the smallest constraint margin (true values for the exact
 * oracle, upper-confidence margins for the noisy one; the factor 2 covers
 * the gap between a confidence bound at the previous iterate and the true
 * values at the current one).
 */
inline double probe_radius(double eta, int d, double M, double L, int m, double slack,
                           bool noisy_mode) {
  if (!(eta > 0.0) || d < 1 || !(M > 0.0) || !(L > 0.0) || m < 0)
    throw std::invalid_argument("probe_radius: inputs must be positive");
  if (!(slack > 0.0)) throw std::invalid_argument("probe_radius: slack must be > 0");
  const double sd = std::sqrt(static_cast<double>(d));
  const double bias_cap = eta / (sd * M);
  const double denom = std::max(L, static_cast<double>(m) * sd * M);
  const double safety_cap = noisy_mode ? slack / (2.0 * denom) : slack / denom;
  return std::min(bias_cap, safety_cap);
}

/**
 * Adaptive safe step size
 *   gamma = min( slack / (2 L ||g||), 1 / L2 ),
 * which guarantees gamma*||g|| <= slack/(2L) and hence that every constraint
 * value at most halves toward 0 in one step. With ||g|| = 0 the first branch
 * is vacuous and gamma = 1/L2.
 */
inline double step_size(double slack, double L, double gradient_norm, double L2) {
  if (!(slack > 0.0)) throw std::invalid_argument("step_size: slack must be > 0");
  if (!(L > 0.0) || !(L2 > 0.0)) throw std::invalid_argument("step_size: L and L2 must be > 0");
  if (gradient_norm < 0.0) throw std::invalid_argument("step_size: negative gradient norm");
  const double smooth_cap = 1.0 / L2;
  if (gradient_norm == 0.0) return smooth_cap;
  return std::min(slack / (2.0 * L * gradient_norm), smooth_cap);
}

/// Per-iterate barrier bookkeeping at a fixed eta.
struct BarrierState {
  double eta = 0.0;
  Vec constraint_values;  // all strictly negative (true values or UCBs)
  double slack = 0.0;     // min_i(-value_i)
  Vec lambda;             // lambda_i = eta / (-value_i)
  Vec gradient_estimate;
  double smoothness_bound = 0.0;  // L2 at this iterate

  static BarrierState make(double eta, Vec values, Vec gradient_est, double M, double L) {
    detail::require_strictly_negative(values, "BarrierState");
    BarrierState s;
    s.eta = eta;
    s.slack = std::numeric_limits<double>::infinity();
    s.lambda.reserve(values.size());
    for (double v : values) {
      s.slack = std::min(s.slack, -v);
      s.lambda.push_back(eta / (-v));
    }
    s.smoothness_bound = local_smoothness(values, eta, M, L);
    s.constraint_values = std::move(values);
    s.gradient_estimate = std::move(gradient_est);
    return s;
  }
};

}  // namespace zolb
