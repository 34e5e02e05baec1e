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

namespace softlabel::dynamics {

/// A monotone-nonincreasing accuracy surface rho(Delta, gamma) on [0,1]^2
/// with outputs clamped to [0,1]. Monotonicity is validated on a grid at
/// construction.
class AccuracyFunction {
 public:
  enum class Family { Constant, Linear, Logistic, Table };

  static AccuracyFunction constant(double value);
  /// rho = a0 - a_delta*Delta - a_gamma*gamma (clamped); a_delta, a_gamma >= 0.
  static AccuracyFunction linear(double a0, double a_delta, double a_gamma);
  /// rho = 1 / (1 + exp((w_delta*Delta + w_gamma*gamma - bias) / tau));
  /// w_delta, w_gamma >= 0, tau > 0.
  static AccuracyFunction logistic(double w_delta, double w_gamma, double bias, double tau);
  /// Bilinear interpolation of a res x res grid of values over [0,1]^2
  /// (row index = Delta ascending, column = gamma ascending).
  static AccuracyFunction table(std::vector<std::vector<double>> grid);

  /// From a family name and flat parameter list (CLI form).
  static AccuracyFunction from_params(const std::string& family,
                                      const std::vector<double>& params);

  double operator()(double delta, double gamma) const;
  Family family() const { return family_; }

 private:
  AccuracyFunction(Family family, std::vector<double> params,
                   std::vector<std::vector<double>> grid);
  double eval_raw(double delta, double gamma) const;
  void validate_monotone() const;

  Family family_;
  std::vector<double> params_;
  std::vector<std::vector<double>> grid_;
};

struct DynamicsConfig {
  int c = 10;
  int k = 1;
  double rho0 = 0.0;
  double tol = 1e-10;
  long max_iter = 10000;

  void validate() const;
};

struct Trajectory {
  std::vector<double> rho;  // rho[0] = rho0
  bool converged = false;
  bool damped = false;  // the 0.5-damped update engaged

  std::string to_csv() const;  // columns t,rho_t
};

/// Iterates rho_{t+1} = rho(1 - rho_t, (c-k-rho_t)/(c-1)) (the equality form
/// of the lower-bound recurrence; gamma argument clamped to [0,1]) until the
/// step falls below tol or max_iter is reached. After 50 non-contracting
/// oscillating steps a 0.5 damping factor engages.
Trajectory iterate(const AccuracyFunction& rho, const DynamicsConfig& cfg);

struct LipschitzEstimate {
  double k_l = 0.0;        // l1-metric Lipschitz constant estimate
  double composite = 0.0;  // (1 + 1/(c-1)) * k_l, the contraction factor
  bool certified = false;  // k_l < 1 - 1/c
};

/// Max over adjacent grid-point pairs of |rho(p) - rho(q)| / ||p - q||_1.
LipschitzEstimate lipschitz_estimate(const AccuracyFunction& rho, int grid_resolution, int c);

struct FixedPointResult {
  double rho_final = 0.0;
  long iterations = 0;
  bool converged = false;
  bool contraction_certified = false;
  LipschitzEstimate lipschitz;
};

/// Solves x = rho(1-x, (c-k-x)/(c-1)) by iteration from rho0. Throws
/// NumericalError (carrying the last iterate in the message) when max_iter
/// is exhausted.
FixedPointResult fixed_point(const AccuracyFunction& rho, const DynamicsConfig& cfg);

}  // namespace softlabel::dynamics
