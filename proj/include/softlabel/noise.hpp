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

#pragma once

#include <string>
#include <vector>

#include "softlabel/rng.hpp"
#include "softlabel/types.hpp"

namespace softlabel::noise {

/// Continuous zero-location noise distribution used for additive-noise labels.
struct NoiseModel {
  enum class Kind { Gaussian, Laplace };
  Kind kind = Kind::Gaussian;
  double scale = 1.0;  // sigma for Gaussian, b for Laplace

  void validate() const;
  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  double sample(SplitRng& rng) const;

  static Kind kind_from_string(const std::string& s);
  std::string kind_name() const;
};

/// The i-th smallest of n i.i.d. draws (1 = smallest).
struct OrderSpec {
  NoiseModel base;
  int n = 1;
  int i = 1;
};

/// Binomial-tail form of the order-statistic CDF, evaluated stably in the
/// log domain: F_(i)(x) = sum_{j=i}^{n} C(n,j) F(x)^j (1-F(x))^(n-j).
double order_statistic_cdf(const OrderSpec& spec, double x);

/// Same tail given the base CDF value p directly.
double binomial_tail(double p, int n, int i);

enum class DeltaMethod { MonteCarlo, Quadrature };

struct DeltaEstimate {
  double delta = 0.0;
  double gamma = 0.0;      // (delta + k - 1) / (c - 1)
  double std_error = 0.0;  // MC: max(binomial SE, 1/N); quadrature: error estimate
  DeltaMethod method = DeltaMethod::MonteCarlo;
  long samples = 0;  // MC only
  bool converged = true;
  bool degenerate_k = false;  // k == c: every label is in the top set
};

/// Probability that the noisy true-label entry (1 + noise) fails to rank in
/// the top k of the full noisy one-hot vector.
///
/// Monte Carlo: `budget` samples split over deterministic sub-streams, so the
/// result is identical for any `threads`. Quadrature: adaptive evaluation of
/// 1 - E_y[ F_(c-k)(1 + y) ] with F_(c-k) the order CDF of the c-1 wrong
/// entries; `budget` is ignored.
DeltaEstimate delta_additive_noise(const NoiseModel& model, int c, int k, DeltaMethod method,
                                   long budget, SplitRng rng, int threads = 1);

/// The literal published formula Pr(1 + y > x), x ~ Order(d, c-1, c-k).
/// Complementary to delta_additive_noise; exposed for comparison only.
double delta_paper_literal(const NoiseModel& model, int c, int k);

/// gamma = (Delta + k - 1) / (c - 1).
double gamma_additive_noise(double delta, int c, int k);

/// One-hot labels plus i.i.d. per-entry noise, shifted by the minimum entry
/// and rescaled to sum 1 (rank-preserving).
SoftDataset make_noisy_dataset(const std::vector<int>& true_labels, const NoiseModel& model,
                               int c, SplitRng rng);

}  // namespace softlabel::noise
