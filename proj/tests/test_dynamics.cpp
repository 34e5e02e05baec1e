// Copyright 2026 The softlabel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "softlabel/dynamics.hpp"
#include "softlabel/errors.hpp"

using namespace softlabel;
using dynamics::AccuracyFunction;
using dynamics::DynamicsConfig;

namespace {

// Closed form for the linear family rho = a0 - a1*Delta - a2*gamma:
// x = a0 - a1(1-x) - a2(c-k-x)/(c-1) solved for x.
double linear_fixed_point(double a0, double a1, double a2, int c, int k) {
  const double numer = a0 - a1 - a2 * (c - k) / (c - 1.0);
  const double slope = a1 + a2 / (c - 1.0);
  return numer / (1.0 - slope);
}

}  // namespace

TEST_CASE("constant family jumps to its value and stays") {
  const auto rho = AccuracyFunction::constant(0.8);
  DynamicsConfig cfg{10, 4, 0.1, 1e-12, 100};
  const auto traj = dynamics::iterate(rho, cfg);
  REQUIRE(traj.rho.size() >= 2);
  CHECK(traj.rho[1] == doctest::Approx(0.8));
  CHECK(traj.rho.back() == doctest::Approx(0.8));
  CHECK(traj.converged);

  const auto fp = dynamics::fixed_point(rho, cfg);
  CHECK(fp.rho_final == doctest::Approx(0.8));
  CHECK(fp.lipschitz.k_l == doctest::Approx(0.0));
}

TEST_CASE("linear family converges to the closed-form fixed point") {
  const auto rho = AccuracyFunction::linear(1.0, 0.3, 0.2);
  DynamicsConfig cfg{10, 4, 0.1, 5e-11, 200};
  const double closed = linear_fixed_point(1.0, 0.3, 0.2, 10, 4);
  CHECK(closed == doctest::Approx(0.8360655737704918).epsilon(1e-12));

  const auto fp = dynamics::fixed_point(rho, cfg);
  CHECK(std::abs(fp.rho_final - closed) < 1e-9);
  CHECK(fp.contraction_certified);
  CHECK(fp.lipschitz.k_l == doctest::Approx(0.3).epsilon(1e-9));

  // Monotone increasing trajectory from below the fixed point.
  const auto traj = dynamics::iterate(rho, cfg);
  for (size_t t = 1; t < traj.rho.size(); ++t) CHECK(traj.rho[t] >= traj.rho[t - 1] - 1e-15);
}

TEST_CASE("certified contractions agree across initializations") {
  const auto rho = AccuracyFunction::linear(1.0, 0.3, 0.2);
  DynamicsConfig lo{10, 4, 0.0, 5e-11, 200};
  DynamicsConfig hi{10, 4, 1.0, 5e-11, 200};
  const auto a = dynamics::fixed_point(rho, lo);
  const auto b = dynamics::fixed_point(rho, hi);
  CHECK(std::abs(a.rho_final - b.rho_final) < 2e-10);
}

TEST_CASE("identity trap is not certified") {
  // rho = 1 - Delta has Lipschitz constant exactly 1 >= 1 - 1/c.
  const auto rho = AccuracyFunction::linear(1.0, 1.0, 0.0);
  const auto lip = dynamics::lipschitz_estimate(rho, 101, 10);
  CHECK(lip.k_l == doctest::Approx(1.0));
  CHECK_FALSE(lip.certified);
  // The map is the identity: every start is a fixed point, so iteration
  // stops immediately but without certification.
  DynamicsConfig cfg{10, 4, 0.37, 1e-12, 100};
  const auto fp = dynamics::fixed_point(rho, cfg);
  CHECK(fp.rho_final == doctest::Approx(0.37));
  CHECK_FALSE(fp.contraction_certified);
}

TEST_CASE("fixed-point residual is below tolerance") {
  const auto rho = AccuracyFunction::logistic(2.0, 1.0, 1.2, 0.4);
  DynamicsConfig cfg{10, 4, 0.5, 1e-12, 2000};
  const auto fp = dynamics::fixed_point(rho, cfg);
  const double x = fp.rho_final;
  const double residual = std::abs(x - rho(1.0 - x, (10.0 - 4.0 - x) / 9.0));
  CHECK(residual < 1e-10);
}

TEST_CASE("geometric tail bound for certified contractions") {
  const auto rho = AccuracyFunction::linear(0.95, 0.35, 0.25);
  DynamicsConfig cfg{8, 3, 0.05, 1e-13, 500};
  const auto fp = dynamics::fixed_point(rho, cfg);
  const auto traj = dynamics::iterate(rho, cfg);
  REQUIRE(fp.contraction_certified);
  const double factor = fp.lipschitz.composite;
  for (size_t t = traj.rho.size() / 2; t + 1 < traj.rho.size(); ++t) {
    const double e_now = std::abs(traj.rho[t] - fp.rho_final);
    const double e_next = std::abs(traj.rho[t + 1] - fp.rho_final);
    if (e_now < 1e-13) break;  // at floating noise level
    CHECK(e_next <= factor * e_now + 1e-13);
  }
}

TEST_CASE("non-convergence is reported") {
  const auto rho = AccuracyFunction::linear(1.0, 0.3, 0.2);
  DynamicsConfig cfg{10, 4, 0.0, 1e-10, 3};  // cap too small
  const auto traj = dynamics::iterate(rho, cfg);
  CHECK_FALSE(traj.converged);
  CHECK_THROWS_AS(dynamics::fixed_point(rho, cfg), NumericalError);
}

TEST_CASE("monotonicity validation rejects increasing surfaces") {
  CHECK_THROWS_AS(AccuracyFunction::from_params("linear", {0.5, -0.1, 0.2}), ParameterError);
  CHECK_THROWS_AS(AccuracyFunction::table({{0.1, 0.2}, {0.3, 0.4}}), ParameterError);
  CHECK_NOTHROW(AccuracyFunction::table({{0.9, 0.5}, {0.4, 0.2}}));
}

TEST_CASE("table interpolation and refinement-stable lipschitz estimate") {
  // Sample a smooth monotone-decreasing surface onto a grid.
  const auto f = [](double d, double g) { return 1.0 / (1.0 + d + 0.5 * g); };
  const int res = 51;
  std::vector<std::vector<double>> grid(res, std::vector<double>(res));
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      grid[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          f(i / (res - 1.0), j / (res - 1.0));
  const auto rho = AccuracyFunction::table(grid);
  CHECK(rho(0.5, 0.5) == doctest::Approx(f(0.5, 0.5)).epsilon(1e-3));

  const auto coarse = dynamics::lipschitz_estimate(rho, res, 10);
  const auto fine = dynamics::lipschitz_estimate(rho, 2 * res - 1, 10);
  CHECK(coarse.k_l == doctest::Approx(fine.k_l).epsilon(0.05));
}

TEST_CASE("gamma argument stays clamped") {
  const auto rho = AccuracyFunction::linear(1.0, 0.5, 0.4);
  DynamicsConfig cfg{2, 1, 0.9, 1e-10, 500};  // c-k-rho can dip below 0
  const auto traj = dynamics::iterate(rho, cfg);
  for (double v : traj.rho) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("trajectory csv shape") {
  const auto rho = AccuracyFunction::constant(0.6);
  DynamicsConfig cfg{10, 4, 0.0, 1e-12, 10};
  const auto csv = dynamics::iterate(rho, cfg).to_csv();
  CHECK(csv.rfind("t,rho_t\n0,0\n", 0) == 0);
}
