// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include "zolb/core.hpp"

using namespace zolb;

TEST_CASE("gaussian sampler is deterministic under seeding") {
  GaussianSampler a(42), b(42), c(43);
  bool all_equal = true;
  bool any_differ = false;
  for (int i = 0; i < 1000; ++i) {
    const double va = a.standard_normal();
    if (va != b.standard_normal()) all_equal = false;
    if (va != c.standard_normal()) any_differ = true;
  }
  CHECK(all_equal);
  CHECK(any_differ);
}

TEST_CASE("gaussian sampler moments") {
  GaussianSampler g(7);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = g.standard_normal();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == Approx(1.0).margin(0.03));
}

TEST_CASE("consecutive draws are uncorrelated") {
  GaussianSampler g(11);
  const int n = 100000;
  std::vector<double> xs(n);
  for (double& v : xs) v = g.standard_normal();
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i + 1 < n; ++i) num += (xs[i] - mean) * (xs[i + 1] - mean);
  for (int i = 0; i < n; ++i) den += (xs[i] - mean) * (xs[i] - mean);
  CHECK(std::abs(num / den) < 0.02);
}

TEST_CASE("vector helpers") {
  Vec a{3.0, 4.0};
  CHECK(norm2(a) == Approx(5.0));
  CHECK(norm_inf(a) == Approx(4.0));
  Vec b{1.0, 1.0};
  axpy(2.0, a, b);
  CHECK(b[0] == Approx(7.0));
  CHECK(b[1] == Approx(9.0));
  CHECK(dot(a, a) == Approx(25.0));
}

TEST_CASE("mix_seed spreads nearby salts") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(5, 3) == mix_seed(5, 3));
}
