// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include "zolb/barrier.hpp"

using namespace zolb;

TEST_CASE("barrier value") {
  CHECK(barrier_value(0.0, std::vector<double>{-1.0}, 0.5) == Approx(0.0));
  CHECK(barrier_value(0.0, std::vector<double>{-std::exp(-1.0)}, 0.5) == Approx(0.5));
  CHECK(barrier_value(2.0, std::vector<double>{-1.0, -1.0}, 0.123) == Approx(2.0));
  CHECK_THROWS_AS(barrier_value(0.0, std::vector<double>{0.0}, 0.5), std::domain_error);
  CHECK_THROWS_AS(barrier_value(0.0, std::vector<double>{-1.0, 0.2}, 0.5), std::domain_error);
}

TEST_CASE("barrier gradient assembly") {
  SECTION("zero estimates give the zero vector") {
    const Vec g0{0.0, 0.0};
    const std::vector<Vec> gc{{0.0, 0.0}};
    auto g = barrier_gradient(g0, gc, std::vector<double>{-0.3}, 0.7);
    CHECK(norm2(g) == 0.0);
  }
  SECTION("worked example") {
    const Vec g0{1.0};
    const std::vector<Vec> gc{{-1.0}};
    auto g = barrier_gradient(g0, gc, std::vector<double>{-0.5}, 0.1);
    CHECK(g[0] == Approx(0.8));
  }
  SECTION("matches the analytic barrier gradient on a linear pair") {
    // f0(x) = x, f1(x) = -x at x = 0.2, eta = 0.1: dB = 1 - eta/x = 0.5
    const Vec g0{1.0};
    const std::vector<Vec> gc{{-1.0}};
    auto g = barrier_gradient(g0, gc, std::vector<double>{-0.2}, 0.1);
    CHECK(g[0] == Approx(0.5));
  }
  SECTION("rejects nonnegative constraint values") {
    const Vec g0{1.0};
    const std::vector<Vec> gc{{1.0}};
    CHECK_THROWS_AS(barrier_gradient(g0, gc, std::vector<double>{0.0}, 0.1), std::domain_error);
  }
}

TEST_CASE("local smoothness constant") {
  CHECK(local_smoothness(std::vector<double>{-0.5}, 0.1, 5.0, 7.0) == Approx(85.4));
  CHECK(local_smoothness(std::vector<double>{-0.5, -2.0}, 0.0, 5.0, 7.0) == Approx(5.0));
  CHECK(local_smoothness(std::vector<double>{-1e9}, 0.1, 5.0, 7.0) == Approx(5.0).margin(1e-6));
  CHECK_THROWS_AS(local_smoothness(std::vector<double>{0.0}, 0.1, 5.0, 7.0), std::domain_error);
}

TEST_CASE("local smoothness with confidence bounds dominates the true-value one") {
  // upper confidence bounds shrink every slack, so L2 can only grow
  const std::vector<double> truth{-0.5, -0.9};
  const std::vector<double> ucbs{-0.4, -0.7};
  CHECK(local_smoothness(ucbs, 0.2, 5.0, 7.0) >= local_smoothness(truth, 0.2, 5.0, 7.0));
}

TEST_CASE("probe radius") {
  SECTION("worked example at the turning start slack") {
    const double nu = probe_radius(0.1, 2, 5.0, 7.0, 1, 0.2740385, false);
    CHECK(nu == Approx(0.0141421).margin(1e-6));
    // the feasibility branch value
    CHECK(0.2740385 / std::max(7.0, std::sqrt(2.0) * 5.0) == Approx(0.03875).margin(1e-4));
  }
  SECTION("noisy mode halves the feasibility branch") {
    const double e = probe_radius(10.0, 2, 5.0, 7.0, 1, 0.2, false);
    const double s = probe_radius(10.0, 2, 5.0, 7.0, 1, 0.2, true);
    CHECK(s == Approx(e / 2.0));
  }
  SECTION("shrinks to zero with the slack") {
    CHECK(probe_radius(0.1, 2, 5.0, 7.0, 1, 1e-9, false) < 1e-9);
  }
  SECTION("bias branch binds for huge slack") {
    CHECK(probe_radius(0.1, 2, 5.0, 7.0, 1, 1e9, false) ==
          Approx(0.1 / (std::sqrt(2.0) * 5.0)));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(probe_radius(0.1, 2, 5.0, 7.0, 1, 0.0, false), std::invalid_argument);
    CHECK_THROWS_AS(probe_radius(0.0, 2, 5.0, 7.0, 1, 0.1, false), std::invalid_argument);
  }
}

TEST_CASE("probe radius never exceeds the safety fractions of the slack") {
  GaussianSampler rng(23);
  for (int t = 0; t < 300; ++t) {
    const double eta = 0.01 + rng.uniform01();
    const int d = 1 + static_cast<int>(rng.engine()() % 4);
    const double M = 0.5 + 5.0 * rng.uniform01();
    const double L = 0.5 + 8.0 * rng.uniform01();
    const int m = 1 + static_cast<int>(rng.engine()() % 5);
    const double slack = 0.001 + rng.uniform01();
    CHECK(probe_radius(eta, d, M, L, m, slack, false) <= slack / L + 1e-15);
    CHECK(probe_radius(eta, d, M, L, m, slack, true) <= slack / (2.0 * L) + 1e-15);
  }
}

TEST_CASE("step size") {
  CHECK(step_size(0.5, 7.0, 10.0, 85.4) == Approx(0.0035714).margin(1e-6));
  CHECK(step_size(0.5, 7.0, 0.0, 85.4) == Approx(1.0 / 85.4));
  CHECK(step_size(1e12, 7.0, 10.0, 85.4) == Approx(1.0 / 85.4));
  CHECK_THROWS_AS(step_size(0.0, 7.0, 1.0, 85.4), std::invalid_argument);
  CHECK_THROWS_AS(step_size(0.5, 7.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("step displacement never exceeds slack/(2L)") {
  GaussianSampler rng(29);
  for (int t = 0; t < 300; ++t) {
    const double slack = 0.001 + rng.uniform01();
    const double L = 0.5 + 8.0 * rng.uniform01();
    const double g = 1e-6 + 20.0 * rng.uniform01();
    const double L2 = 0.5 + 100.0 * rng.uniform01();
    CHECK(step_size(slack, L, g, L2) * g <= slack / (2.0 * L) * (1.0 + 1e-12));
  }
}

TEST_CASE("barrier state and the dual identities") {
  // lambda_i = eta / (-v_i) makes every complementarity product exactly eta,
  // and the Lagrangian gradient coincides with the barrier gradient
  const double eta = 0.3;
  auto st = BarrierState::make(eta, {-0.5, -0.25}, {1.0, -2.0}, 5.0, 7.0);
  CHECK(st.slack == Approx(0.25));
  CHECK(st.lambda[0] == Approx(0.6));
  CHECK(st.lambda[1] == Approx(1.2));
  CHECK(norm_inf(st.lambda) == Approx(eta / st.slack));
  for (std::size_t i = 0; i < st.lambda.size(); ++i)
    CHECK(st.lambda[i] * (-st.constraint_values[i]) == Approx(eta));

  // grad L(x, lambda) = grad f0 + sum lambda_i grad f_i equals
  // grad f0 + eta * sum grad f_i / (-f_i) = grad B by construction
  const Vec gf0{2.0, 1.0};
  const std::vector<Vec> gfc{{1.0, 0.0}, {0.0, 1.0}};
  Vec lagr = gf0;
  for (std::size_t i = 0; i < gfc.size(); ++i) axpy(st.lambda[i], gfc[i], lagr);
  const Vec barrier_g = barrier_gradient(gf0, gfc, st.constraint_values, eta);
  CHECK(norm2(lagr) == Approx(norm2(barrier_g)));
  CHECK_THROWS_AS(BarrierState::make(eta, {-0.5, 0.0}, {}, 5.0, 7.0), std::domain_error);
}
