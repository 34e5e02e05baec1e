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

#include "softlabel/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "softlabel/errors.hpp"
#include "softlabel/quadrature.hpp"

namespace softlabel::noise {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880168872420970;

// Acklam's rational approximation to the standard normal quantile, polished
// with one Halley step against erfc.
double probit(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / kSqrt2) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

// Gaussian tails are numerically zero beyond 12 sigma; Laplace tails need a
// wider window to push the truncation error below the quadrature tolerance
// (exp(-40) ~ 4e-18 vs exp(-12) ~ 6e-6).
double truncation_radius(const NoiseModel& m) {
  return (m.kind == NoiseModel::Kind::Gaussian ? 12.0 : 40.0) * m.scale;
}

struct McTally {
  long misses = 0;
  long samples = 0;
};

McTally mc_block(const NoiseModel& model, int c, int k, long samples, SplitRng rng) {
  McTally tally;
  tally.samples = samples;
  for (long s = 0; s < samples; ++s) {
    const double threshold = 1.0 + model.sample(rng);
    int exceed = 0;
    for (int j = 0; j < c - 1; ++j) {
      if (model.sample(rng) > threshold && ++exceed >= k) break;
    }
    if (exceed >= k) ++tally.misses;
  }
  return tally;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(scale > 0.0)) throw ParameterError("noise: scale must be positive");
}

double NoiseModel::pdf(double x) const {
  if (kind == Kind::Gaussian) {
    const double z = x / scale;
    return std::exp(-0.5 * z * z) / (scale * 2.50662827463100050241576528481);
  }
  return std::exp(-std::abs(x) / scale) / (2.0 * scale);
}

double NoiseModel::cdf(double x) const {
  if (kind == Kind::Gaussian) return 0.5 * std::erfc(-x / (scale * kSqrt2));
  return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

double NoiseModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile: p must lie in (0,1)");
  if (kind == Kind::Gaussian) return scale * probit(p);
  return p < 0.5 ? scale * std::log(2.0 * p) : -scale * std::log(2.0 * (1.0 - p));
}

double NoiseModel::sample(SplitRng& rng) const {
  return kind == Kind::Gaussian ? rng.gaussian(scale) : rng.laplace(scale);
}

NoiseModel::Kind NoiseModel::kind_from_string(const std::string& s) {
  if (s == "gaussian") return Kind::Gaussian;
  if (s == "laplace") return Kind::Laplace;
  throw ParameterError("unknown noise kind '" + s + "'");
}

std::string NoiseModel::kind_name() const {
  return kind == Kind::Gaussian ? "gaussian" : "laplace";
}

double binomial_tail(double p, int n, int i) {
  if (i <= 0) return 1.0;
  if (i > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double logp = std::log(p);
  const double log1mp = std::log1p(-p);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (int j = i; j <= n; ++j) {
    const double term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                        j * logp + (n - j) * log1mp;
    if (term > log_sum)
      log_sum = term + std::log1p(std::exp(log_sum - term));
    else
      log_sum += std::log1p(std::exp(term - log_sum));
  }
  return std::exp(std::min(log_sum, 0.0));
}

double order_statistic_cdf(const OrderSpec& spec, double x) {
  spec.base.validate();
  if (spec.n < 1 || spec.i < 1 || spec.i > spec.n)
    throw ParameterError("order_statistic_cdf: requires 1 <= i <= n");
  return binomial_tail(spec.base.cdf(x), spec.n, spec.i);
}

DeltaEstimate delta_additive_noise(const NoiseModel& model, int c, int k, DeltaMethod method,
                                   long budget, SplitRng rng, int threads) {
  model.validate();
  if (c < 2) throw ParameterError("delta_additive_noise: c must be >= 2");
  if (k < 1 || k > c) throw ParameterError("delta_additive_noise: requires 1 <= k <= c");
  DeltaEstimate est;
  est.method = method;
  if (k == c) {
    est.degenerate_k = true;
    est.gamma = gamma_additive_noise(0.0, c, c - 1);
    return est;
  }

  if (method == DeltaMethod::Quadrature) {
    const double radius = truncation_radius(model);
    const auto integrand = [&](double t) {
      return binomial_tail(model.cdf(1.0 + t), c - 1, c - k) * model.pdf(t);
    };
    const auto q = integrate_adaptive(integrand, -radius, radius, 1e-8);
    est.delta = std::clamp(1.0 - q.value, 0.0, 1.0);
    est.std_error = q.error_estimate;
    est.converged = q.converged;
  } else {
    if (budget < 1) throw ParameterError("delta_additive_noise: budget must be >= 1");
    constexpr long kBlock = 65536;
    const long nblocks = (budget + kBlock - 1) / kBlock;
    std::vector<McTally> tallies(static_cast<size_t>(nblocks));
    const int nworkers = std::max(1, std::min<int>(threads, static_cast<int>(nblocks)));
    auto run_range = [&](long lo, long hi) {
      for (long b = lo; b < hi; ++b) {
        const long take = std::min(kBlock, budget - b * kBlock);
        tallies[static_cast<size_t>(b)] =
            mc_block(model, c, k, take, rng.substream(static_cast<uint64_t>(b)));
      }
    };
    if (nworkers == 1) {
      run_range(0, nblocks);
    } else {
      std::vector<std::thread> pool;
      const long per = (nblocks + nworkers - 1) / nworkers;
      for (int w = 0; w < nworkers; ++w)
        pool.emplace_back(run_range, w * per, std::min(nblocks, (w + 1) * per));
      for (auto& t : pool) t.join();
    }
    long misses = 0;
    for (const auto& t : tallies) misses += t.misses;
    est.samples = budget;
    est.delta = static_cast<double>(misses) / static_cast<double>(budget);
    const double binom_se = std::sqrt(est.delta * (1.0 - est.delta) / budget);
    est.std_error = std::max(binom_se, 1.0 / budget);
  }
  est.gamma = gamma_additive_noise(est.delta, c, k);
  return est;
}

double delta_paper_literal(const NoiseModel& model, int c, int k) {
  model.validate();
  if (c < 2 || k < 1 || k > c - 1)
    throw ParameterError("delta_paper_literal: requires 1 <= k <= c-1");
  const double radius = truncation_radius(model);
  const auto integrand = [&](double t) {
    return binomial_tail(model.cdf(1.0 + t), c - 1, c - k) * model.pdf(t);
  };
  return integrate_adaptive(integrand, -radius, radius, 1e-8).value;
}

double gamma_additive_noise(double delta, int c, int k) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw ParameterError("gamma_additive_noise: Delta must lie in [0,1]");
  if (c < 2 || k < 1 || k > c - 1)
    throw ParameterError("gamma_additive_noise: requires 1 <= k <= c-1");
  return (delta + k - 1) / (c - 1);
}

SoftDataset make_noisy_dataset(const std::vector<int>& true_labels, const NoiseModel& model,
                               int c, SplitRng rng) {
  model.validate();
  if (c < 2) throw ParameterError("make_noisy_dataset: c must be >= 2");
  SoftDataset ds;
  ds.c = c;
  ds.examples.reserve(true_labels.size());
  for (size_t idx = 0; idx < true_labels.size(); ++idx) {
    const int y = true_labels[idx];
    if (y < 0 || y >= c) throw ParameterError("make_noisy_dataset: label out of range");
    SplitRng ex_rng = rng.substream(idx);
    LabeledExample ex;
    ex.id = "e" + std::to_string(idx);
    ex.true_label = y;
    ex.soft.values.resize(static_cast<size_t>(c));
    for (;;) {
      for (int j = 0; j < c; ++j)
        ex.soft.values[static_cast<size_t>(j)] = (j == y ? 1.0 : 0.0) + model.sample(ex_rng);
      const double lo = *std::min_element(ex.soft.values.begin(), ex.soft.values.end());
      double sum = 0.0;
      for (double& v : ex.soft.values) {
        v -= lo;
        sum += v;
      }
      if (sum > 0.0) {  // an all-equal draw has measure zero; redraw
        for (double& v : ex.soft.values) v /= sum;
        break;
      }
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace softlabel::noise
