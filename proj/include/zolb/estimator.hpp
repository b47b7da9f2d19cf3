// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "zolb/oracle.hpp"

namespace zolb {

/// Coordinate forward-difference gradient estimate together with the probe
/// radius and replicate count that produced it and its deviation bound.
struct GradientEstimate {
  Vec g;
  double nu = 0.0;        // finite-difference radius used
  std::int64_t n = 1;     // replicates averaged (1 for the exact oracle)
  double bound = 0.0;     // deviation bound on ||g - grad f||_2
  std::optional<double> delta;  // confidence attached; empty = exact
};

/// ||G - grad f||_2 <= sqrt(d) * nu * M / 2 for M-smooth f (exact oracle).
inline double exact_deviation_bound(int d, double nu, double M) {
  return std::sqrt(static_cast<double>(d)) * nu * M / 2.0;
}

/// High-probability deviation bound of the n-replicate averaged estimator
/// when n is at least batch_size(nu, sigma, delta, M).
inline double noisy_deviation_bound(int d, double nu, double M) {
  return std::sqrt(static_cast<double>(d)) * nu * M;
}

/**
 * Replicates needed so the averaged estimator's noise term is dominated by
 * its finite-difference term:  n = ceil(8 sigma^2 ln(1/delta) / (3 nu^4 M^2)),
 * floored at 1. With this n the estimate deviates from the true gradient by
 * at most sqrt(d)*nu*M with probability >= 1-delta.
 */
inline std::int64_t batch_size(double nu, double sigma, double delta, double M) {
  if (!(nu > 0.0)) throw std::invalid_argument("batch_size: nu must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("batch_size: delta must be in (0,1)");
  if (!(M > 0.0)) throw std::invalid_argument("batch_size: M must be > 0");
  if (sigma < 0.0) throw std::invalid_argument("batch_size: sigma must be >= 0");
  if (sigma == 0.0) return 1;
  const double raw = 8.0 * sigma * sigma * std::log(1.0 / delta) / (3.0 * std::pow(nu, 4) * M * M);
  if (raw <= 1.0) return 1;
  return static_cast<std::int64_t>(std::ceil(raw));
}

/// Upper confidence bound on a function value from noisy samples at a point.
struct ConfidenceBound {
  double upper = 0.0;       // sample mean + sigma*sqrt(ln(1/delta))/sqrt(n)
  double half_width = 0.0;  // 2*sigma*sqrt(ln(1/delta))/sqrt(n)
  std::int64_t n = 0;
  double delta = 0.0;
};

inline ConfidenceBound ucb_from_mean(double mean, std::int64_t n, double sigma, double delta) {
  if (n < 1) throw std::invalid_argument("ucb: need at least one sample");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ucb: delta must be in (0,1)");
  const double one_sided = sigma * std::sqrt(std::log(1.0 / delta)) / std::sqrt(static_cast<double>(n));
  return {mean + one_sided, 2.0 * one_sided, n, delta};
}

/// The value lies in [upper - half_width, upper] with probability >= 1-delta
/// under the noise model (a statistical statement, tested in aggregate).
inline ConfidenceBound ucb(std::span<const double> samples, double sigma, double delta) {
  if (samples.empty()) throw std::invalid_argument("ucb: empty sample list");
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  return ucb_from_mean(mean, static_cast<std::int64_t>(samples.size()), sigma, delta);
}

/**
 * Forward-difference gradient of f_i at x from the exact oracle:
 *   G_j = (f(x + nu e_j) - f(x)) / nu.
 * Takes d+1 oracle calls. The caller is responsible for the feasibility of
 * x and of the probe points x + nu e_j.
 */
inline GradientEstimate grad_exact(Oracle& oracle, const Vec& x, int i, double nu,
                                   std::int64_t t = 0) {
  if (!(nu > 0.0)) throw std::invalid_argument("grad_exact: nu must be > 0");
  const int d = oracle.problem().dimension;
  GradientEstimate est;
  est.nu = nu;
  est.n = 1;
  est.g.resize(static_cast<std::size_t>(d));
  const double center = oracle.eval_exact(x, i, t, 0);
  Vec probe = x;
  for (int j = 0; j < d; ++j) {
    probe[static_cast<std::size_t>(j)] += nu;
    est.g[static_cast<std::size_t>(j)] = (oracle.eval_exact(probe, i, t, 0) - center) / nu;
    probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
  }
  est.bound = exact_deviation_bound(d, nu, oracle.problem().smoothness);
  return est;
}

struct NoisyGradientResult {
  GradientEstimate estimate;
  std::vector<double> center_samples;  // the n noisy values at x, reusable for a UCB
};

/**
 * Averaged noisy estimator: the mean over n replicates of the single-shot
 * forward-difference estimator, pairing each replicate's probe values with
 * that replicate's own center value. Takes (d+1)*n oracle calls and returns
 * the center samples so the caller can form confidence bounds without
 * additional queries.
 */
inline NoisyGradientResult grad_noisy(Oracle& oracle, const Vec& x, int i, double nu,
                                      std::int64_t n, std::int64_t t = 0,
                                      std::optional<double> delta = {}) {
  if (!(nu > 0.0)) throw std::invalid_argument("grad_noisy: nu must be > 0");
  if (n < 1) throw std::invalid_argument("grad_noisy: n must be >= 1");
  const int d = oracle.problem().dimension;
  NoisyGradientResult out;
  out.center_samples.reserve(static_cast<std::size_t>(n));
  out.estimate.g.assign(static_cast<std::size_t>(d), 0.0);
  out.estimate.nu = nu;
  out.estimate.n = n;
  out.estimate.delta = delta;
  Vec probe = x;
  for (std::int64_t l = 0; l < n; ++l) {
    const double center = oracle.eval_noisy(x, i, t, l);
    out.center_samples.push_back(center);
    for (int j = 0; j < d; ++j) {
      probe[static_cast<std::size_t>(j)] += nu;
      out.estimate.g[static_cast<std::size_t>(j)] +=
          (oracle.eval_noisy(probe, i, t, l) - center) / nu;
      probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
    }
  }
  for (double& gj : out.estimate.g) gj /= static_cast<double>(n);
  out.estimate.bound = noisy_deviation_bound(d, nu, oracle.problem().smoothness);
  return out;
}

}  // namespace zolb
