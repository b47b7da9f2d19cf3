// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include <sstream>

#include "zolb/oracle.hpp"
#include "zolb/problems.hpp"

using namespace zolb;

namespace {

ProblemSpec shifted_linear() {
  // f0(x) = x, f1(x) = x - 1 (feasible for x < 1)
  ProblemSpec p;
  p.name = "shifted_linear";
  p.dimension = 1;
  p.num_constraints = 1;
  p.smoothness = 1.0;
  p.lipschitz = 1.0;
  p.start = {0.0};
  p.objective = [](const Vec& x) { return x[0]; };
  p.constraints = {[](const Vec& x) { return x[0] - 1.0; }};
  return p;
}

}  // namespace

TEST_CASE("exact evaluation returns true values and appends to the ledger") {
  auto p = shifted_linear();
  Oracle o(p);
  CHECK(o.eval_exact({0.0}, 1) == Approx(-1.0));
  CHECK(o.eval_exact({0.0}, 0) == Approx(0.0));
  CHECK(o.ledger().size() == 2);
}

TEST_CASE("turning oracle values at the starting point") {
  auto p = make_turning_problem();
  Oracle o(p);
  // independently recomputed from the fitted polynomials at (vc, f) = (150, 0.09)
  const double tool_life = 127.5365 - 0.84629 * 150 - 144.21 * 0.09 + 0.001703 * 150 * 150 +
                           0.3656 * 150 * 0.09;
  CHECK(tool_life == Approx(30.8672).epsilon(1e-10));
  const double roughness = 0.7844 - 0.010035 * 150 + 7.0877 * 0.09 + 0.000034 * 150 * 150 -
                           0.018969 * 150 * 0.09;
  const double expected_cost = (50.0 + 40.0 / tool_life) / (150.0 * 0.09);

  CHECK(o.eval_exact(p.start, 1) == Approx(roughness - 0.7).epsilon(1e-12));
  CHECK(o.eval_exact(p.start, 1) == Approx(-0.2740385).epsilon(1e-6));
  CHECK(o.eval_exact(p.start, 0) == Approx(expected_cost).epsilon(1e-12));
  CHECK(o.eval_exact(p.start, 0) == Approx(3.7997).epsilon(1e-4));
}

TEST_CASE("noisy evaluation with sigma = 0 matches exact evaluation") {
  auto p = shifted_linear();
  Oracle exact(p);
  Oracle noisy(p, NoiseModel{0.0, 99, NoiseKind::gaussian, {}});
  for (double x = -0.5; x < 0.9; x += 0.17) {
    for (int i = 0; i <= 1; ++i)
      CHECK(noisy.eval_noisy({x}, i) == exact.eval_exact({x}, i));
  }
}

TEST_CASE("same seed reproduces the same value sequence, ledgers identical") {
  auto p = shifted_linear();
  Oracle a(p, NoiseModel{0.05, 1234, NoiseKind::gaussian, {}});
  Oracle b(p, NoiseModel{0.05, 1234, NoiseKind::gaussian, {}});
  for (int k = 0; k < 200; ++k) {
    const double x = 0.001 * k;
    REQUIRE(a.eval_noisy({x}, k % 2) == b.eval_noisy({x}, k % 2));
  }
  REQUIRE(a.ledger().size() == b.ledger().size());
  for (std::size_t e = 0; e < a.ledger().entries().size(); ++e) {
    CHECK(a.ledger().entries()[e].values == b.ledger().entries()[e].values);
    CHECK(a.ledger().entries()[e].x == b.ledger().entries()[e].x);
  }
}

TEST_CASE("noise sample moments match the sub-Gaussian parameter") {
  auto p = shifted_linear();
  // f(x0) = 0 for the objective at x = 0, so measured values are pure noise
  const double sigma = 0.01;
  Oracle o(p, NoiseModel{sigma, 2024, NoiseKind::gaussian, {}});
  const int n = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = o.eval_noisy({0.0}, 0);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) <= 4.0 * sigma / 100.0);
  CHECK(var <= sigma * sigma * 1.1);
}

TEST_CASE("uniform noise kind has matching variance and bounded support") {
  auto p = shifted_linear();
  const double sigma = 0.5;
  Oracle o(p, NoiseModel{sigma, 5, NoiseKind::uniform, {}});
  const int n = 20000;
  double sumsq = 0.0, maxabs = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = o.eval_noisy({0.0}, 0);
    sumsq += v * v;
    maxabs = std::max(maxabs, std::abs(v));
  }
  CHECK(sumsq / n == Approx(sigma * sigma).epsilon(0.05));
  CHECK(maxabs <= sigma * std::sqrt(3.0) + 1e-12);
}

TEST_CASE("known_exactly constraints are never noised") {
  auto p = make_turning_problem();
  Oracle o(p, NoiseModel{0.05, 77, NoiseKind::gaussian, {}});
  const double exact_box = p.eval(2, p.start);
  for (int k = 0; k < 10; ++k) CHECK(o.eval_noisy(p.start, 2) == exact_box);
  // the roughness constraint is noisy
  bool saw_noise = false;
  const double exact_rough = p.eval(1, p.start);
  for (int k = 0; k < 10; ++k)
    if (o.eval_noisy(p.start, 1) != exact_rough) saw_noise = true;
  CHECK(saw_noise);
}

TEST_CASE("audit flags exactly the infeasible queries") {
  auto p = shifted_linear();
  Oracle o(p);
  o.eval_exact({0.0}, 0);
  o.eval_exact({0.5}, 1);
  auto clean = audit_safety(o.ledger(), p);
  CHECK(clean.empty());

  o.eval_exact({1.1}, 0);  // f1 = +0.1 here
  auto bad = audit_safety(o.ledger(), p);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].constraint == 1);
  CHECK(bad[0].magnitude == Approx(0.1));
  CHECK(bad[0].entry == 2);
}

TEST_CASE("streaming ledger keeps count and audit without entries") {
  auto p = shifted_linear();
  Oracle o(p, NoiseModel{}, LedgerPolicy::streaming);
  Vec out(2);
  for (int k = 0; k < 5; ++k) o.measure_all({0.2 * k}, false, k, 0, out);
  // x = 0.8 is feasible for all five; now one infeasible query
  o.measure_all({1.2}, false, 5, 0, out);
  CHECK(o.ledger().size() == 6);
  CHECK_THROWS_AS(o.ledger().entries(), std::logic_error);
  auto v = audit_safety(o.ledger(), p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].magnitude == Approx(0.2));
  CHECK(o.ledger().min_true_slack() == Approx(-0.2));
}

TEST_CASE("measure_all returns every index in one ledger entry") {
  auto p = make_turning_problem();
  Oracle o(p);
  Vec out(6);
  o.measure_all(p.start, false, 3, 1, out);
  CHECK(o.ledger().size() == 1);
  const auto& e = o.ledger().entries()[0];
  CHECK(e.t == 3);
  CHECK(e.l == 1);
  CHECK(e.indices.size() == 6);
}

TEST_CASE("ledger CSV export schema") {
  auto p = shifted_linear();
  Oracle o(p);
  o.eval_exact({0.25}, 1, 7, 2);
  std::ostringstream os;
  write_ledger_csv(os, o.ledger(), &p, p.dimension);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,l,i,x_1,value,safe\n", 0) == 0);
  CHECK(csv.find("7,2,1,0.25,-0.75,1") != std::string::npos);

  // without ground truth the safe column is blank
  std::ostringstream os2;
  write_ledger_csv(os2, o.ledger(), nullptr, p.dimension);
  CHECK(os2.str().find("-0.75,\n") != std::string::npos);
}

TEST_CASE("scripted noise is consumed in order") {
  auto p = shifted_linear();
  Oracle o(p, NoiseModel{1.0, 0, NoiseKind::scripted, {0.25, -0.5}});
  CHECK(o.eval_noisy({0.0}, 0) == Approx(0.25));
  CHECK(o.eval_noisy({0.0}, 0) == Approx(-0.5));
  CHECK_THROWS_AS(o.eval_noisy({0.0}, 0), std::logic_error);
}

TEST_CASE("oracle rejects out-of-range function indices") {
  auto p = shifted_linear();
  Oracle o(p);
  CHECK_THROWS_AS(o.eval_exact({0.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(o.eval_exact({0.0}, -1), std::invalid_argument);
}
