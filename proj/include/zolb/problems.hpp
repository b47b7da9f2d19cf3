// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "zolb/problem.hpp"

namespace zolb {

// ---------------------------------------------------------------------------
// Turning-process benchmark (cutting-machine parameter tuning).
//
// Decision variable x = (v'_c, f) with the cutting speed rescaled by 1/1000
// so that v'_c lies in [0.1, 0.2] and the feed rate f in [0.08, 0.16].
// Cost C = t_c * (C_M + C_I / T) with t_c = geometry_constant / (v_c * f);
// the tool-life polynomial T and the roughness polynomial R are fitted
// models in the unscaled variables. Constraints, in <= 0 residual form:
// roughness R - 0.7, then the four box residuals (exactly known, unit
// Lipschitz in the rescaled coordinates).
// ---------------------------------------------------------------------------

struct TurningConfig {
  double geometry_constant = 1.0;  // the LD*pi product in t_c; pure positive scaling
  double cost_idle = 40.0;         // C_I
  double cost_machine = 50.0;      // C_M
  double roughness_limit = 0.7;
  double smoothness = 5.0;  // M attached to the rescaled problem
  double lipschitz = 7.0;   // L attached to the rescaled problem
};

inline double turning_tool_life(double vc, double f) {
  return 127.5365 - 0.84629 * vc - 144.21 * f + 0.001703 * vc * vc + 0.3656 * vc * f;
}

inline double turning_roughness(double vc, double f) {
  return 0.7844 - 0.010035 * vc + 7.0877 * f + 0.000034 * vc * vc - 0.018969 * vc * f;
}

inline double turning_cost(const TurningConfig& cfg, double vc, double f) {
  const double T = turning_tool_life(vc, f);
  if (!(T > 0.0)) throw std::domain_error("turning cost: tool life model not positive here");
  return cfg.geometry_constant / (vc * f) * (cfg.cost_machine + cfg.cost_idle / T);
}

inline ProblemSpec make_turning_problem(TurningConfig cfg = {}) {
  ProblemSpec p;
  p.name = "turning";
  p.dimension = 2;
  p.num_constraints = 5;
  p.smoothness = cfg.smoothness;
  p.lipschitz = cfg.lipschitz;
  p.start = {0.15, 0.09};
  p.box_lower = {0.1, 0.08};
  p.box_upper = {0.2, 0.16};
  p.known_exactly = {false, true, true, true, true};
  p.constraint_lipschitz = {cfg.lipschitz, 1.0, 1.0, 1.0, 1.0};

  auto vc_of = [](const Vec& x) { return 1000.0 * x[0]; };

  p.objective = [cfg, vc_of](const Vec& x) { return turning_cost(cfg, vc_of(x), x[1]); };
  p.constraints = {
      [cfg, vc_of](const Vec& x) { return turning_roughness(vc_of(x), x[1]) - cfg.roughness_limit; },
      [](const Vec& x) { return 0.1 - x[0]; },
      [](const Vec& x) { return x[0] - 0.2; },
      [](const Vec& x) { return 0.08 - x[1]; },
      [](const Vec& x) { return x[1] - 0.16; },
  };

  p.objective_gradient = [cfg, vc_of](const Vec& x) -> Vec {
    const double vc = vc_of(x), f = x[1];
    const double T = turning_tool_life(vc, f);
    if (!(T > 0.0)) throw std::domain_error("turning cost gradient: tool life not positive");
    const double tc = cfg.geometry_constant / (vc * f);
    const double inner = cfg.cost_machine + cfg.cost_idle / T;
    const double dT_dvc = -0.84629 + 2.0 * 0.001703 * vc + 0.3656 * f;
    const double dT_df = -144.21 + 0.3656 * vc;
    const double dC_dvc = -tc / vc * inner + tc * (-cfg.cost_idle / (T * T)) * dT_dvc;
    const double dC_df = -tc / f * inner + tc * (-cfg.cost_idle / (T * T)) * dT_df;
    return {1000.0 * dC_dvc, dC_df};
  };
  p.constraint_gradients = {
      [vc_of](const Vec& x) -> Vec {
        const double vc = vc_of(x), f = x[1];
        const double dR_dvc = -0.010035 + 2.0 * 0.000034 * vc - 0.018969 * f;
        const double dR_df = 7.0877 - 0.018969 * vc;
        return {1000.0 * dR_dvc, dR_df};
      },
      [](const Vec&) -> Vec { return {-1.0, 0.0}; },
      [](const Vec&) -> Vec { return {1.0, 0.0}; },
      [](const Vec&) -> Vec { return {0.0, -1.0}; },
      [](const Vec&) -> Vec { return {0.0, 1.0}; },
  };
  return p;
}

// ---------------------------------------------------------------------------
// Analytic verification problems with known solutions.
// ---------------------------------------------------------------------------

/// min x s.t. -x <= 0; the barrier x - eta*log(x) has its minimum at x = eta.
inline ProblemSpec make_linear1d() {
  ProblemSpec p;
  p.name = "linear1d";
  p.dimension = 1;
  p.num_constraints = 1;
  p.smoothness = 1.0;
  p.lipschitz = 1.0;
  p.start = {1.0};
  p.box_lower = {1e-3};
  p.box_upper = {2.0};
  p.objective = [](const Vec& x) { return x[0]; };
  p.constraints = {[](const Vec& x) { return -x[0]; }};
  p.objective_gradient = [](const Vec&) -> Vec { return {1.0}; };
  p.constraint_gradients = {[](const Vec&) -> Vec { return {-1.0}; }};
  return p;
}

inline double linear1d_barrier_minimizer(double eta) { return eta; }

/// min (x1-2)^2 + (x2-2)^2 s.t. x1^2 + x2^2 <= 1.
inline ProblemSpec make_disk_quadratic() {
  ProblemSpec p;
  p.name = "disk_quadratic";
  p.dimension = 2;
  p.num_constraints = 1;
  p.smoothness = 2.0;
  p.lipschitz = 2.0;
  p.start = {0.0, 0.0};
  p.box_lower = {-1.1, -1.1};
  p.box_upper = {1.1, 1.1};
  p.objective = [](const Vec& x) {
    return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] - 2.0) * (x[1] - 2.0);
  };
  p.constraints = {[](const Vec& x) { return x[0] * x[0] + x[1] * x[1] - 1.0; }};
  p.objective_gradient = [](const Vec& x) -> Vec {
    return {2.0 * (x[0] - 2.0), 2.0 * (x[1] - 2.0)};
  };
  p.constraint_gradients = {[](const Vec& x) -> Vec { return {2.0 * x[0], 2.0 * x[1]}; }};
  return p;
}

inline Vec disk_quadratic_kkt_point() {
  const double r = 1.0 / std::sqrt(2.0);
  return {r, r};
}

inline double disk_quadratic_kkt_multiplier() { return 2.0 * std::sqrt(2.0) - 1.0; }

// ---------------------------------------------------------------------------
// Random smooth instances for property suites and scaling studies.
// ---------------------------------------------------------------------------

namespace detail {

inline double spectral_norm_symmetric(const std::vector<Vec>& A) {
  const std::size_t d = A.size();
  Vec v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  Vec w(d, 0.0);
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t r = 0; r < d; ++r) w[r] = dot(A[r], v);
    lam = norm2(w);
    if (lam == 0.0) return 0.0;
    for (std::size_t r = 0; r < d; ++r) v[r] = w[r] / lam;
  }
  return lam;
}

}  // namespace detail

/**
 * Reproducible random instance: objective is a random quadratic with Hessian
 * spectral norm below the cap M; the feasible set is a ball (convex
 * quadratic constraint) minus m-1 spherical holes (concave-side quadratics),
 * all scaled so constraint gradient norms stay below the cap L over the
 * instance's box. The witness point x0 (the ball center) is strictly
 * feasible by construction. Identical seeds produce identical instances.
 */
inline ProblemSpec make_random_instance(int d, int m, std::uint64_t seed, double M, double L) {
  if (d < 1 || m < 1) throw std::invalid_argument("random instance: d and m must be >= 1");
  if (!(M > 0.0) || !(L > 0.0)) throw std::invalid_argument("random instance: caps must be > 0");
  GaussianSampler rng(mix_seed(seed, 0xB0C));
  const double R0 = 1.5;
  const double box_half = 2.0;
  const double sd = std::sqrt(static_cast<double>(d));

  Vec c0(static_cast<std::size_t>(d));
  for (double& c : c0) c = 0.4 * (rng.uniform01() - 0.5);

  ProblemSpec p;
  p.name = "random_d" + std::to_string(d) + "_m" + std::to_string(m) + "_s" + std::to_string(seed);
  p.dimension = d;
  p.num_constraints = m;
  p.smoothness = M;
  p.lipschitz = L;
  p.start = c0;
  p.box_lower.assign(static_cast<std::size_t>(d), -box_half);
  p.box_upper.assign(static_cast<std::size_t>(d), box_half);

  // worst-case distance from a constraint center to a box corner
  auto reach_of = [&](const Vec& center) { return box_half * sd + norm2(center); };

  // enclosing ball: s * (||x - c0||^2 - R0^2)
  const double s_ball = 0.95 * std::min(M / 2.0, L / (2.0 * reach_of(c0)));
  p.constraints.push_back([c0, s_ball, R0](const Vec& x) {
    return s_ball * (distance(x, c0) * distance(x, c0) - R0 * R0);
  });
  p.constraint_gradients.push_back([c0, s_ball](const Vec& x) -> Vec {
    Vec g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = 2.0 * s_ball * (x[j] - c0[j]);
    return g;
  });

  for (int h = 1; h < m; ++h) {
    Vec dir(static_cast<std::size_t>(d));
    for (double& v : dir) v = rng.standard_normal();
    const double dn = std::max(norm2(dir), 1e-12);
    const double dist = (0.75 + 0.2 * rng.uniform01()) * R0;
    Vec ch = c0;
    for (std::size_t j = 0; j < ch.size(); ++j) ch[j] += dist * dir[j] / dn;
    const double rh = (0.15 + 0.15 * rng.uniform01()) * R0;
    const double s_hole = 0.95 * std::min(M / 2.0, L / (2.0 * reach_of(ch)));
    p.constraints.push_back([ch, s_hole, rh](const Vec& x) {
      return s_hole * (rh * rh - distance(x, ch) * distance(x, ch));
    });
    p.constraint_gradients.push_back([ch, s_hole](const Vec& x) -> Vec {
      Vec g(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) g[j] = -2.0 * s_hole * (x[j] - ch[j]);
      return g;
    });
  }

  // random quadratic objective 0.5*(x-z)^T Q (x-z), ||Q||_2 <= 0.9*M
  std::vector<Vec> A(static_cast<std::size_t>(d), Vec(static_cast<std::size_t>(d)));
  for (auto& row : A)
    for (double& v : row) v = rng.standard_normal();
  std::vector<Vec> Q(static_cast<std::size_t>(d), Vec(static_cast<std::size_t>(d), 0.0));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      for (int k = 0; k < d; ++k)
        Q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
            A[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] *
            A[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
  const double qn = detail::spectral_norm_symmetric(Q);
  const double qs = qn > 0.0 ? 0.9 * M / qn : 0.0;
  for (auto& row : Q)
    for (double& v : row) v *= qs;
  Vec z = c0;
  for (double& v : z) v += 1.2 * R0 * (rng.uniform01() - 0.5);

  p.objective = [Q, z](const Vec& x) {
    double s = 0.0;
    Vec dxv(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) dxv[j] = x[j] - z[j];
    for (std::size_t r = 0; r < x.size(); ++r) s += dxv[r] * dot(Q[r], dxv);
    return 0.5 * s;
  };
  p.objective_gradient = [Q, z](const Vec& x) -> Vec {
    Vec dxv(x.size()), g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) dxv[j] = x[j] - z[j];
    for (std::size_t r = 0; r < x.size(); ++r) g[r] = dot(Q[r], dxv);
    return g;
  };
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Brute-force grid reference: the independent oracle optimizers are tested
// against.
// ---------------------------------------------------------------------------

enum class ReferenceTarget { objective, barrier };

struct ReferenceSolution {
  Vec point;
  double value = std::numeric_limits<double>::infinity();
  double resolution = 0.0;  // base grid spacing
  std::uint64_t evaluations = 0;
};

/// Barrier value with infeasible points mapped to +inf, so the grid scan can
/// rank them out without a feasibility precheck.
inline double barrier_value_for_reference(double f0, std::span<const double> cons, double eta) {
  double s = 0.0;
  for (double v : cons) {
    if (!(v < 0.0)) return std::numeric_limits<double>::infinity();
    s += std::log(-v);
  }
  return f0 - eta * s;
}

namespace detail {

struct GridBest {
  Vec point;
  double value = std::numeric_limits<double>::infinity();
  bool found = false;
};

template <typename Target>
inline GridBest grid_scan(const ProblemSpec& p, const Target& target, const Vec& lo,
                          const Vec& hi, double h, std::uint64_t& evals) {
  const int d = p.dimension;
  std::vector<std::int64_t> steps(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const double span = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
    steps[static_cast<std::size_t>(j)] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(span / h)) + 1);
  }
  GridBest best;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  Vec pt(static_cast<std::size_t>(d));
  bool done = false;
  while (!done) {
    for (int j = 0; j < d; ++j)
      pt[static_cast<std::size_t>(j)] =
          lo[static_cast<std::size_t>(j)] + h * static_cast<double>(idx[static_cast<std::size_t>(j)]);
    ++evals;
    bool feasible = true;
    for (int i = 1; i <= p.num_constraints && feasible; ++i)
      if (!(p.eval(i, pt) < 0.0)) feasible = false;
    if (feasible) {
      const double v = target(pt);
      if (v < best.value) {
        best.value = v;
        best.point = pt;
        best.found = true;
      }
    }
    done = true;
    for (int j = 0; j < d; ++j) {
      if (++idx[static_cast<std::size_t>(j)] < steps[static_cast<std::size_t>(j)]) {
        done = false;
        break;
      }
      idx[static_cast<std::size_t>(j)] = 0;
    }
  }
  return best;
}

}  // namespace detail

/**
 * Exhaustive evaluation of the objective or of the barrier B_eta on an
 * h-grid over the problem's box, keeping feasible points only, followed by
 * two local refinements (step/10 within one coarse cell of the incumbent,
 * accepted only while the target improves). Throws when no feasible grid
 * point exists.
 */
inline ReferenceSolution grid_reference(const ProblemSpec& p, ReferenceTarget target, double eta,
                                        double h) {
  if (!p.has_box()) throw std::invalid_argument("grid_reference: problem has no box");
  if (p.dimension > 3) throw std::invalid_argument("grid_reference: dense grids only for d <= 3");
  if (!(h > 0.0)) throw std::invalid_argument("grid_reference: resolution must be > 0");

  Vec cv(static_cast<std::size_t>(p.num_constraints));
  auto score = [&](const Vec& x) {
    if (target == ReferenceTarget::objective) return p.eval(0, x);
    for (int i = 1; i <= p.num_constraints; ++i) cv[static_cast<std::size_t>(i - 1)] = p.eval(i, x);
    return barrier_value_for_reference(p.eval(0, x), cv, eta);
  };

  ReferenceSolution out;
  out.resolution = h;
  detail::GridBest best = detail::grid_scan(p, score, p.box_lower, p.box_upper, h, out.evaluations);
  if (!best.found) throw std::runtime_error("grid_reference: no feasible grid point found");

  double step = h;
  for (int level = 0; level < 2; ++level) {
    Vec lo(best.point), hi(best.point);
    for (int j = 0; j < p.dimension; ++j) {
      lo[static_cast<std::size_t>(j)] = std::max(lo[static_cast<std::size_t>(j)] - step,
                                                 p.box_lower[static_cast<std::size_t>(j)]);
      hi[static_cast<std::size_t>(j)] = std::min(hi[static_cast<std::size_t>(j)] + step,
                                                 p.box_upper[static_cast<std::size_t>(j)]);
    }
    step /= 10.0;
    detail::GridBest refined = detail::grid_scan(p, score, lo, hi, step, out.evaluations);
    if (!refined.found || !(refined.value < best.value)) break;
    best = refined;
  }
  out.point = best.point;
  out.value = best.value;
  return out;
}

// ---------------------------------------------------------------------------
// Constant revalidation: sampled Hessian spectral norms against M, sampled
// constraint gradient norms against L. The turning instance inherits its
// published constants, which this check can flag without failing a run.
// ---------------------------------------------------------------------------

struct ConstantsCheck {
  double max_hessian_norm = 0.0;
  double max_constraint_gradient_norm = 0.0;
  bool smoothness_ok = true;
  bool lipschitz_ok = true;
};

inline ConstantsCheck check_constants(const ProblemSpec& p, int samples, std::uint64_t seed) {
  if (!p.has_analytic_gradients() || !p.has_box())
    throw std::invalid_argument("check_constants: needs analytic gradients and a box");
  GaussianSampler rng(seed);
  const int d = p.dimension;
  ConstantsCheck out;
  Vec x(static_cast<std::size_t>(d));
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < d; ++j) {
      const double a = p.box_lower[static_cast<std::size_t>(j)];
      const double b = p.box_upper[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(j)] = a + (b - a) * rng.uniform01();
    }
    bool feasible = true;
    for (int i = 1; i <= p.num_constraints && feasible; ++i)
      if (p.eval(i, x) > 0.0) feasible = false;
    if (!feasible) continue;
    for (int i = 0; i <= p.num_constraints; ++i) {
      if (i >= 1)
        out.max_constraint_gradient_norm =
            std::max(out.max_constraint_gradient_norm, norm2(p.gradient(i, x)));
      // finite-difference Hessian of f_i from the analytic gradient
      std::vector<Vec> H(static_cast<std::size_t>(d), Vec(static_cast<std::size_t>(d)));
      Vec xp = x;
      for (int j = 0; j < d; ++j) {
        const double hstep = 1e-5 * std::max(1.0, std::abs(x[static_cast<std::size_t>(j)]));
        xp[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + hstep;
        Vec gp = p.gradient(i, xp);
        xp[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] - hstep;
        Vec gm = p.gradient(i, xp);
        xp[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
        for (int r = 0; r < d; ++r)
          H[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
              (gp[static_cast<std::size_t>(r)] - gm[static_cast<std::size_t>(r)]) / (2.0 * hstep);
      }
      for (int r = 0; r < d; ++r)
        for (int c = r + 1; c < d; ++c) {
          const double sym = 0.5 * (H[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +
                                    H[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
          H[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = sym;
          H[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] = sym;
        }
      out.max_hessian_norm = std::max(out.max_hessian_norm, detail::spectral_norm_symmetric(H));
    }
  }
  const double tol = 1.0 + 1e-6;
  out.smoothness_ok = out.max_hessian_norm <= p.smoothness * tol;
  out.lipschitz_ok = out.max_constraint_gradient_norm <= p.lipschitz * tol;
  return out;
}

}  // namespace zolb
