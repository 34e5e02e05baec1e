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

#include "softlabel/errors.hpp"
#include "softlabel/indicators.hpp"
#include "softlabel/noise.hpp"

using namespace softlabel;
using noise::DeltaMethod;
using noise::NoiseModel;
using noise::OrderSpec;

namespace {

const NoiseModel kStdGauss{NoiseModel::Kind::Gaussian, 1.0};
const NoiseModel kLap03{NoiseModel::Kind::Laplace, 0.3};

std::vector<int> cycled_labels(int c, long n) {
  std::vector<int> y(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) y[static_cast<size_t>(i)] = static_cast<int>(i % c);
  return y;
}

}  // namespace

TEST_CASE("noise model pdf/cdf/quantile are consistent") {
  for (const auto& m : {kStdGauss, kLap03}) {
    // cdf monotone from 0 to 1.
    CHECK(m.cdf(-50 * m.scale) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.cdf(50 * m.scale) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = -1;
    for (double x = -4; x <= 4; x += 0.25) {
      const double v = m.cdf(x * m.scale);
      CHECK(v >= prev);
      prev = v;
    }
    // quantile inverts cdf.
    for (double p : {0.001, 0.01, 0.3, 0.5, 0.7, 0.99, 0.999})
      CHECK(m.cdf(m.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    // pdf integrates to ~1 (midpoint rule sanity).
    double mass = 0;
    const double h = 0.001 * m.scale;
    for (double x = -30 * m.scale; x < 30 * m.scale; x += h) mass += m.pdf(x + h / 2) * h;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("sampler matches the cdf (KS-style grid check)") {
  for (const auto& m : {kStdGauss, kLap03}) {
    SplitRng rng(13, 0);
    const int n = 200000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = m.sample(rng);
    for (double q : {-1.5, -0.5, 0.0, 0.5, 1.5}) {
      long below = 0;
      for (double x : xs)
        if (x <= q * m.scale) ++below;
      CHECK(static_cast<double>(below) / n ==
            doctest::Approx(m.cdf(q * m.scale)).epsilon(0.02));
    }
  }
}

TEST_CASE("order statistic cdf closed forms") {
  for (double x : {-1.0, -0.2, 0.0, 0.4, 2.0}) {
    CHECK(noise::order_statistic_cdf({kStdGauss, 1, 1}, x) ==
          doctest::Approx(kStdGauss.cdf(x)).epsilon(1e-12));
    CHECK(noise::order_statistic_cdf({kStdGauss, 5, 5}, x) ==
          doctest::Approx(std::pow(kStdGauss.cdf(x), 5)).epsilon(1e-12));
  }
  // Median of 9 at the distribution median: binomial tail at p = 1/2.
  CHECK(noise::order_statistic_cdf({kStdGauss, 9, 5}, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("order statistic cdf is monotone in x and decreasing in rank") {
  double prev = -1;
  for (double x = -3; x <= 3; x += 0.2) {
    const double v = noise::order_statistic_cdf({kLap03, 7, 3}, x);
    CHECK(v >= prev);
    prev = v;
  }
  for (double x : {-0.5, 0.0, 0.5}) {
    for (int i = 1; i < 7; ++i) {
      CHECK(noise::order_statistic_cdf({kStdGauss, 7, i}, x) >=
            noise::order_statistic_cdf({kStdGauss, 7, i + 1}, x));
    }
  }
}

TEST_CASE("two-class closed form") {
  // c = 2, k = 1: Delta = Pr(N(0, 2 sigma^2) > 1) = 1 - Phi(1/(sigma sqrt 2)).
  const double closed = 0.5 * std::erfc(0.5);  // sigma = 1
  const auto quad = noise::delta_additive_noise(kStdGauss, 2, 1, DeltaMethod::Quadrature, 0,
                                                SplitRng(0, 0));
  CHECK(quad.delta == doctest::Approx(closed).epsilon(1e-10));
  const auto mc = noise::delta_additive_noise(kStdGauss, 2, 1, DeltaMethod::MonteCarlo, 200000,
                                              SplitRng(1, 0));
  CHECK(std::abs(mc.delta - closed) <= 3 * mc.std_error);
}

TEST_CASE("tiny scale means the +1 margin cannot be overcome") {
  const NoiseModel tiny{NoiseModel::Kind::Gaussian, 1e-6};
  const auto quad =
      noise::delta_additive_noise(tiny, 10, 4, DeltaMethod::Quadrature, 0, SplitRng(0, 0));
  CHECK(quad.delta <= 1e-12);
}

TEST_CASE("quadrature matches Monte Carlo within 3 standard errors") {
  for (const auto& m : {NoiseModel{NoiseModel::Kind::Gaussian, 0.5},
                        NoiseModel{NoiseModel::Kind::Laplace, 0.5}}) {
    const auto quad = noise::delta_additive_noise(m, 10, 4, DeltaMethod::Quadrature, 0,
                                                  SplitRng(0, 0));
    const auto mc = noise::delta_additive_noise(m, 10, 4, DeltaMethod::MonteCarlo, 400000,
                                                SplitRng(21, 0));
    CHECK(std::abs(quad.delta - mc.delta) <= 3 * mc.std_error);
  }
}

TEST_CASE("monte carlo is thread-count invariant and deterministic") {
  const auto one = noise::delta_additive_noise(kLap03, 5, 2, DeltaMethod::MonteCarlo, 300000,
                                               SplitRng(5, 3), 1);
  const auto four = noise::delta_additive_noise(kLap03, 5, 2, DeltaMethod::MonteCarlo, 300000,
                                                SplitRng(5, 3), 4);
  CHECK(one.delta == four.delta);
  const auto again = noise::delta_additive_noise(kLap03, 5, 2, DeltaMethod::MonteCarlo, 300000,
                                                 SplitRng(5, 3), 1);
  CHECK(one.delta == again.delta);
}

TEST_CASE("delta is monotone in scale and in k") {
  double prev = -1;
  for (double scale : {0.1, 0.3, 0.5, 1.0, 2.0}) {
    const auto est = noise::delta_additive_noise({NoiseModel::Kind::Gaussian, scale}, 10, 4,
                                                 DeltaMethod::Quadrature, 0, SplitRng(0, 0));
    CHECK(est.delta >= prev);
    prev = est.delta;
  }
  prev = 2;
  for (int k = 1; k <= 9; ++k) {
    const auto est = noise::delta_additive_noise({NoiseModel::Kind::Gaussian, 0.7}, 10, k,
                                                 DeltaMethod::Quadrature, 0, SplitRng(0, 0));
    CHECK(est.delta <= prev);
    prev = est.delta;
  }
}

TEST_CASE("gamma formula") {
  CHECK(noise::gamma_additive_noise(0.0, 10, 4) == doctest::Approx(1.0 / 3.0));
  CHECK(noise::gamma_additive_noise(1.0, 2, 1) == doctest::Approx(1.0));
  CHECK(noise::gamma_additive_noise(0.1, 10, 4) == doctest::Approx(3.1 / 9.0));
  CHECK_THROWS_AS(noise::gamma_additive_noise(0.5, 10, 10), ParameterError);
}

TEST_CASE("paper-literal formula is the complement of the implemented delta") {
  for (int k : {1, 3, 4}) {
    const auto est = noise::delta_additive_noise({NoiseModel::Kind::Laplace, 0.4}, 10, k,
                                                 DeltaMethod::Quadrature, 0, SplitRng(0, 0));
    CHECK(noise::delta_paper_literal({NoiseModel::Kind::Laplace, 0.4}, 10, k) ==
          doctest::Approx(1.0 - est.delta).epsilon(1e-8));
  }
}

TEST_CASE("k = c degenerates to delta 0 with a note") {
  const auto est =
      noise::delta_additive_noise(kStdGauss, 5, 5, DeltaMethod::Quadrature, 0, SplitRng(0, 0));
  CHECK(est.delta == 0.0);
  CHECK(est.degenerate_k);
}

TEST_CASE("noisy datasets are valid soft labels and rank-preserving") {
  const auto labels = cycled_labels(10, 2000);
  const auto ds = noise::make_noisy_dataset(labels, {NoiseModel::Kind::Gaussian, 0.5}, 10,
                                            SplitRng(17, 0));
  ds.validate();
  // Near-zero scale: (almost) one-hot labels, so measured delta is 0.
  const auto clean = noise::make_noisy_dataset(labels, {NoiseModel::Kind::Gaussian, 1e-7}, 10,
                                               SplitRng(18, 0));
  CHECK(indicators::estimate_delta(clean, 1, indicators::Semantics::TopK) == 0.0);
}

TEST_CASE("empirical dataset indicators match the analytic estimator") {
  const long n = 100000;
  const auto labels = cycled_labels(10, n);
  for (const auto& m : {NoiseModel{NoiseModel::Kind::Gaussian, 0.5},
                        NoiseModel{NoiseModel::Kind::Laplace, 0.3}}) {
    const auto ds = noise::make_noisy_dataset(labels, m, 10, SplitRng(19, 0));
    const double measured = indicators::estimate_delta(ds, 4, indicators::Semantics::TopK);
    const auto analytic =
        noise::delta_additive_noise(m, 10, 4, DeltaMethod::Quadrature, 0, SplitRng(0, 0));
    const double se = std::max(std::sqrt(measured * (1 - measured) / n), 1.0 / n);
    CHECK(std::abs(measured - analytic.delta) <= 3 * se);

    // Per-label co-occurrence under symmetric noise follows the gamma formula.
    const auto g = indicators::estimate_gamma(ds, 4, indicators::Semantics::TopK);
    const double predicted = noise::gamma_additive_noise(measured, 10, 4);
    for (double v : g.per_label) CHECK(std::abs(v - predicted) <= 0.01);
  }
}
