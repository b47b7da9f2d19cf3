// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "zolb/core.hpp"

namespace zolb {

/// Additive measurement-noise law. `sigma` is the sub-Gaussian parameter;
/// both concrete kinds have variance exactly sigma^2 and satisfy the
/// sub-Gaussian moment bound with parameter sigma. `scripted` replays a fixed
/// sequence of draws (test hook).
enum class NoiseKind { gaussian, uniform, scripted };

struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  NoiseKind kind = NoiseKind::gaussian;
  std::vector<double> script;  // used only by NoiseKind::scripted

  void validate() const {
    if (sigma < 0.0) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
  }
};

/**
 * A constrained minimization problem
 *
 *   min f0(x)  s.t.  f_i(x) <= 0, i = 1..m
 *
 * together with the smoothness/Lipschitz constants the solver is told to
 * assume and a strictly feasible starting point. Constraint indices are
 * 1-based in the public eval() interface (0 is the objective), matching the
 * oracle's function-index convention.
 */
struct ProblemSpec {
  std::string name;
  int dimension = 0;       // d
  int num_constraints = 0; // m
  std::function<double(const Vec&)> objective;
  std::vector<std::function<double(const Vec&)>> constraints;

  double smoothness = 0.0;  // M: gradient Lipschitz constant of every f_i
  double lipschitz = 0.0;   // L: value Lipschitz constant of the constraints
  Vec start;                // strictly feasible

  /// Constraints whose values are never corrupted by noise (e.g. box bounds
  /// on the decision variables). Empty means "none".
  std::vector<bool> known_exactly;

  /// Per-constraint Lipschitz constants, when sharper than the global L.
  /// Empty means "use L for every constraint". Only consulted for probe
  /// feasibility caps on exactly-known constraints.
  std::vector<double> constraint_lipschitz;

  // Analytic gradients, for verification and certification only. The solver
  // never reads these.
  std::function<Vec(const Vec&)> objective_gradient;
  std::vector<std::function<Vec(const Vec&)>> constraint_gradients;

  // Axis-aligned sampling box containing the region of interest; used by the
  // grid reference and the automatic iteration budget.
  Vec box_lower, box_upper;

  double eval(int i, const Vec& x) const {
    if (i == 0) return objective(x);
    return constraints.at(static_cast<std::size_t>(i - 1))(x);
  }

  bool exact_constraint(int ci) const {  // ci in [0, m)
    return !known_exactly.empty() && known_exactly.at(static_cast<std::size_t>(ci));
  }

  double constraint_lip(int ci) const {
    if (constraint_lipschitz.empty()) return lipschitz;
    return constraint_lipschitz.at(static_cast<std::size_t>(ci));
  }

  bool has_analytic_gradients() const {
    if (!objective_gradient) return false;
    if (constraint_gradients.size() != static_cast<std::size_t>(num_constraints)) return false;
    for (const auto& g : constraint_gradients)
      if (!g) return false;
    return true;
  }

  /// Gradient of f_i (i = 0..m); requires analytic gradients.
  Vec gradient(int i, const Vec& x) const {
    if (i == 0) return objective_gradient(x);
    return constraint_gradients.at(static_cast<std::size_t>(i - 1))(x);
  }

  bool has_box() const {
    return box_lower.size() == static_cast<std::size_t>(dimension) &&
           box_upper.size() == box_lower.size();
  }

  /// Smallest constraint margin min_i(-f_i(x)); positive iff strictly feasible.
  double true_slack(const Vec& x) const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints) s = std::min(s, -c(x));
    return s;
  }

  void validate() const {
    if (dimension < 1) throw std::invalid_argument("ProblemSpec: dimension must be >= 1");
    if (num_constraints < 1) throw std::invalid_argument("ProblemSpec: need at least one constraint");
    if (!(smoothness > 0.0)) throw std::invalid_argument("ProblemSpec: smoothness M must be > 0");
    if (!(lipschitz > 0.0)) throw std::invalid_argument("ProblemSpec: Lipschitz L must be > 0");
    if (!objective) throw std::invalid_argument("ProblemSpec: missing objective");
    if (constraints.size() != static_cast<std::size_t>(num_constraints))
      throw std::invalid_argument("ProblemSpec: constraint count mismatch");
    if (start.size() != static_cast<std::size_t>(dimension))
      throw std::invalid_argument("ProblemSpec: start point has wrong dimension");
    if (!known_exactly.empty() && known_exactly.size() != constraints.size())
      throw std::invalid_argument("ProblemSpec: known_exactly size mismatch");
    if (!constraint_lipschitz.empty() && constraint_lipschitz.size() != constraints.size())
      throw std::invalid_argument("ProblemSpec: constraint_lipschitz size mismatch");
    for (int i = 1; i <= num_constraints; ++i) {
      if (!(eval(i, start) < 0.0))
        throw std::invalid_argument("ProblemSpec: start point is not strictly feasible");
    }
  }
};

}  // namespace zolb
