// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>

#include "zolb/problem.hpp"

namespace zolb {

/// One oracle call: all requested function values at a single query point.
struct Measurement {
  Vec x;
  std::int64_t t = 0;  // iteration tag
  std::int64_t l = 0;  // replicate tag
  std::vector<int> indices;   // function indices measured (0 = objective)
  std::vector<double> values; // returned values, parallel to `indices`
  std::vector<double> noise;  // noise added per value (0 for exact entries)
};

struct Violation {
  std::uint64_t entry = 0;  // ledger position
  std::int64_t t = 0;
  std::int64_t l = 0;
  int constraint = 0;   // 1-based constraint index
  double magnitude = 0; // f_i(x) > 0
  Vec x;
};

/// `retain` keeps every measurement in memory (inspectable, exportable);
/// `streaming` keeps only the running count plus the ground-truth safety
/// audit, for runs whose ledgers would not fit in memory.
enum class LedgerPolicy { retain, streaming };

/**
 * Append-only record of oracle activity. The count N is the number of oracle
 * calls (query points, one per replicate), which is the complexity measure
 * the solver reports. When a ground-truth problem is attached, every queried
 * point is audited against the true constraints as it is recorded.
 */
class MeasurementLedger {
 public:
  explicit MeasurementLedger(LedgerPolicy policy = LedgerPolicy::retain,
                             const ProblemSpec* ground_truth = nullptr)
      : policy_(policy), ground_truth_(ground_truth) {}

  LedgerPolicy policy() const { return policy_; }
  std::uint64_t size() const { return count_; }
  bool retained() const { return policy_ == LedgerPolicy::retain; }

  const std::vector<Measurement>& entries() const {
    if (!retained()) throw std::logic_error("ledger entries not retained (streaming policy)");
    return entries_;
  }

  const std::vector<Violation>& streaming_violations() const { return violations_; }
  double min_true_slack() const { return min_true_slack_; }

  void append(Measurement&& m, std::span<const double> true_constraint_values = {}) {
    const std::uint64_t pos = count_++;
    if (ground_truth_ != nullptr) audit_point(pos, m, true_constraint_values);
    if (retained()) entries_.push_back(std::move(m));
  }

 private:
  void audit_point(std::uint64_t pos, const Measurement& m,
                   std::span<const double> true_constraint_values) {
    const int mcons = ground_truth_->num_constraints;
    for (int i = 1; i <= mcons; ++i) {
      const double v = true_constraint_values.empty()
                           ? ground_truth_->eval(i, m.x)
                           : true_constraint_values[static_cast<std::size_t>(i - 1)];
      min_true_slack_ = std::min(min_true_slack_, -v);
      if (v > 0.0) violations_.push_back({pos, m.t, m.l, i, v, m.x});
    }
  }

  LedgerPolicy policy_;
  const ProblemSpec* ground_truth_;
  std::uint64_t count_ = 0;
  std::vector<Measurement> entries_;
  std::vector<Violation> violations_;
  double min_true_slack_ = std::numeric_limits<double>::infinity();
};

/**
 * Zeroth-order oracle over a ProblemSpec. Exact evaluation returns true
 * function values; noisy evaluation adds an independent zero-mean draw of
 * parameter sigma per (call, function index), except for constraints flagged
 * known_exactly, which are never noised. Every call appends one ledger entry.
 *
 * The oracle does not refuse infeasible queries; the ledger audit is what
 * detects them. Keeping iterates and probes feasible is the solver's job.
 */
class Oracle {
 public:
  Oracle(const ProblemSpec& problem, NoiseModel noise = {},
         LedgerPolicy policy = LedgerPolicy::retain, bool audit_against_truth = true)
      : p_(&problem),
        noise_(std::move(noise)),
        rng_(noise_.seed),
        ledger_(policy, audit_against_truth ? &problem : nullptr) {
    noise_.validate();
  }

  const ProblemSpec& problem() const { return *p_; }
  const NoiseModel& noise_model() const { return noise_; }
  const MeasurementLedger& ledger() const { return ledger_; }
  MeasurementLedger take_ledger() { return std::move(ledger_); }

  double eval_exact(const Vec& x, int i, std::int64_t t = 0, std::int64_t l = 0) {
    check_index(i);
    const double v = p_->eval(i, x);
    record_single(x, i, v, 0.0, t, l);
    return v;
  }

  double eval_noisy(const Vec& x, int i, std::int64_t t = 0, std::int64_t l = 0) {
    check_index(i);
    const double f = p_->eval(i, x);
    double xi = 0.0;
    if (noise_.sigma > 0.0 && !(i >= 1 && p_->exact_constraint(i - 1))) xi = draw();
    record_single(x, i, f + xi, xi, t, l);
    return f + xi;
  }

  /**
   * One oracle call returning all m+1 function values at x (out must have
   * size m+1). Appends a single ledger entry. The true constraint values are
   * computed as a by-product and handed to the streaming audit, so auditing
   * large runs costs nothing extra.
   */
  void measure_all(const Vec& x, bool noisy, std::int64_t t, std::int64_t l,
                   std::span<double> out) {
    const int m = p_->num_constraints;
    if (out.size() != static_cast<std::size_t>(m + 1))
      throw std::invalid_argument("measure_all: output span must have size m+1");
    true_buf_.resize(static_cast<std::size_t>(m));
    Measurement entry;
    entry.x = x;
    entry.t = t;
    entry.l = l;
    const bool keep_detail = ledger_.retained();
    if (keep_detail) {
      entry.indices.resize(static_cast<std::size_t>(m + 1));
      entry.values.resize(static_cast<std::size_t>(m + 1));
      entry.noise.resize(static_cast<std::size_t>(m + 1));
    }
    for (int i = 0; i <= m; ++i) {
      const double f = p_->eval(i, x);
      if (i >= 1) true_buf_[static_cast<std::size_t>(i - 1)] = f;
      double xi = 0.0;
      if (noisy && noise_.sigma > 0.0 && !(i >= 1 && p_->exact_constraint(i - 1))) xi = draw();
      out[static_cast<std::size_t>(i)] = f + xi;
      if (keep_detail) {
        entry.indices[static_cast<std::size_t>(i)] = i;
        entry.values[static_cast<std::size_t>(i)] = f + xi;
        entry.noise[static_cast<std::size_t>(i)] = xi;
      }
    }
    ledger_.append(std::move(entry), true_buf_);
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i > p_->num_constraints)
      throw std::invalid_argument("oracle: function index out of range");
  }

  void record_single(const Vec& x, int i, double value, double xi, std::int64_t t,
                     std::int64_t l) {
    Measurement entry;
    entry.x = x;
    entry.t = t;
    entry.l = l;
    entry.indices = {i};
    entry.values = {value};
    entry.noise = {xi};
    ledger_.append(std::move(entry));
  }

  double draw() {
    switch (noise_.kind) {
      case NoiseKind::gaussian:
        return noise_.sigma * rng_.standard_normal();
      case NoiseKind::uniform: {
        // variance sigma^2, support [-sigma*sqrt(3), sigma*sqrt(3)]
        const double half = noise_.sigma * 1.7320508075688772;
        return half * (2.0 * rng_.uniform01() - 1.0);
      }
      case NoiseKind::scripted: {
        if (script_pos_ >= noise_.script.size())
          throw std::logic_error("scripted noise exhausted");
        return noise_.script[script_pos_++];
      }
    }
    return 0.0;
  }

  const ProblemSpec* p_;
  NoiseModel noise_;
  GaussianSampler rng_;
  std::size_t script_pos_ = 0;
  MeasurementLedger ledger_;
  Vec true_buf_;
};

/// Re-audit a retained ledger against ground truth: one Violation per
/// (entry, violated constraint). Empty result means the run was safe.
inline std::vector<Violation> audit_safety(const MeasurementLedger& ledger,
                                           const ProblemSpec& problem) {
  if (!ledger.retained()) return ledger.streaming_violations();
  std::vector<Violation> out;
  std::uint64_t pos = 0;
  for (const Measurement& m : ledger.entries()) {
    for (int i = 1; i <= problem.num_constraints; ++i) {
      const double v = problem.eval(i, m.x);
      if (v > 0.0) out.push_back({pos, m.t, m.l, i, v, m.x});
    }
    ++pos;
  }
  return out;
}

/// Shortest round-trip decimal form; keeps CSV output byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/**
 * CSV export, one row per (entry, function index):
 *   t,l,i,x_1..x_d,value,safe
 * `safe` is 1/0 ground-truth feasibility of the query point when a problem
 * is supplied, blank otherwise.
 */
inline void write_ledger_csv(std::ostream& os, const MeasurementLedger& ledger,
                             const ProblemSpec* ground_truth, int dimension) {
  os << "t,l,i";
  for (int j = 1; j <= dimension; ++j) os << ",x_" << j;
  os << ",value,safe\n";
  for (const Measurement& m : ledger.entries()) {
    std::string safe;
    if (ground_truth != nullptr) {
      bool ok = true;
      for (int i = 1; i <= ground_truth->num_constraints; ++i)
        if (ground_truth->eval(i, m.x) > 0.0) ok = false;
      safe = ok ? "1" : "0";
    }
    for (std::size_t k = 0; k < m.indices.size(); ++k) {
      os << m.t << ',' << m.l << ',' << m.indices[k];
      for (double c : m.x) os << ',' << format_double(c);
      os << ',' << format_double(m.values[k]) << ',' << safe << '\n';
    }
  }
}

}  // namespace zolb
