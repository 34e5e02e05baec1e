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

#include "softlabel/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "softlabel/errors.hpp"

namespace softlabel::dynamics {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

AccuracyFunction::AccuracyFunction(Family family, std::vector<double> params,
                                   std::vector<std::vector<double>> grid)
    : family_(family), params_(std::move(params)), grid_(std::move(grid)) {
  validate_monotone();
}

AccuracyFunction AccuracyFunction::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw ParameterError("accuracy function: constant must lie in [0,1]");
  return AccuracyFunction(Family::Constant, {value}, {});
}

AccuracyFunction AccuracyFunction::linear(double a0, double a_delta, double a_gamma) {
  if (a_delta < 0.0 || a_gamma < 0.0)
    throw ParameterError("accuracy function: linear slopes must be nonnegative");
  return AccuracyFunction(Family::Linear, {a0, a_delta, a_gamma}, {});
}

AccuracyFunction AccuracyFunction::logistic(double w_delta, double w_gamma, double bias,
                                            double tau) {
  if (w_delta < 0.0 || w_gamma < 0.0 || !(tau > 0.0))
    throw ParameterError("accuracy function: logistic needs weights >= 0 and tau > 0");
  return AccuracyFunction(Family::Logistic, {w_delta, w_gamma, bias, tau}, {});
}

AccuracyFunction AccuracyFunction::table(std::vector<std::vector<double>> grid) {
  if (grid.size() < 2) throw ParameterError("accuracy table: needs at least a 2x2 grid");
  for (const auto& row : grid)
    if (row.size() != grid.size())
      throw ParameterError("accuracy table: grid must be square");
  return AccuracyFunction(Family::Table, {}, std::move(grid));
}

AccuracyFunction AccuracyFunction::from_params(const std::string& family,
                                               const std::vector<double>& params) {
  auto need = [&](size_t n) {
    if (params.size() != n)
      throw ParameterError("accuracy function '" + family + "' expects " + std::to_string(n) +
                           " parameters, got " + std::to_string(params.size()));
  };
  if (family == "constant") {
    need(1);
    return constant(params[0]);
  }
  if (family == "linear") {
    need(3);
    return linear(params[0], params[1], params[2]);
  }
  if (family == "logistic") {
    need(4);
    return logistic(params[0], params[1], params[2], params[3]);
  }
  throw ParameterError("unknown accuracy family '" + family + "'");
}

double AccuracyFunction::eval_raw(double delta, double gamma) const {
  switch (family_) {
    case Family::Constant:
      return params_[0];
    case Family::Linear:
      return params_[0] - params_[1] * delta - params_[2] * gamma;
    case Family::Logistic:
      return 1.0 / (1.0 + std::exp((params_[0] * delta + params_[1] * gamma - params_[2]) /
                                   params_[3]));
    case Family::Table: {
      const int res = static_cast<int>(grid_.size());
      const double fx = delta * (res - 1);
      const double fy = gamma * (res - 1);
      const int i = std::min(static_cast<int>(fx), res - 2);
      const int j = std::min(static_cast<int>(fy), res - 2);
      const double tx = fx - i;
      const double ty = fy - j;
      const auto& g = grid_;
      return (1 - tx) * (1 - ty) * g[i][j] + tx * (1 - ty) * g[i + 1][j] +
             (1 - tx) * ty * g[i][j + 1] + tx * ty * g[i + 1][j + 1];
    }
  }
  return 0.0;
}

double AccuracyFunction::operator()(double delta, double gamma) const {
  return clamp01(eval_raw(clamp01(delta), clamp01(gamma)));
}

void AccuracyFunction::validate_monotone() const {
  const int res = family_ == Family::Table ? static_cast<int>(grid_.size()) : 33;
  const double h = 1.0 / (res - 1);
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const double d = i * h;
      const double g = j * h;
      const double v = clamp01(eval_raw(d, g));
      if (i + 1 < res && clamp01(eval_raw(d + h, g)) > v + 1e-12)
        throw ParameterError("accuracy function: increases with Delta");
      if (j + 1 < res && clamp01(eval_raw(d, g + h)) > v + 1e-12)
        throw ParameterError("accuracy function: increases with gamma");
    }
  }
}

void DynamicsConfig::validate() const {
  if (c < 2) throw ParameterError("dynamics: c must be >= 2");
  if (k < 1 || k > c - 1) throw ParameterError("dynamics: requires 1 <= k <= c-1");
  if (!(rho0 >= 0.0 && rho0 <= 1.0)) throw ParameterError("dynamics: rho0 must lie in [0,1]");
  if (!(tol > 0.0)) throw ParameterError("dynamics: tol must be positive");
  if (max_iter < 1) throw ParameterError("dynamics: max_iter must be >= 1");
}

Trajectory iterate(const AccuracyFunction& rho, const DynamicsConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.rho.push_back(cfg.rho0);
  double x = cfg.rho0;
  double prev_step = 0.0;
  int oscillating = 0;
  for (long t = 0; t < cfg.max_iter; ++t) {
    const double gamma_arg = clamp01((cfg.c - cfg.k - x) / (cfg.c - 1.0));
    const double mapped = rho(1.0 - x, gamma_arg);
    double step = mapped - x;
    if (!traj.damped) {
      if (t > 0 && step * prev_step < 0.0 && std::abs(step) >= 0.999 * std::abs(prev_step)) {
        if (++oscillating >= 50) traj.damped = true;
      } else {
        oscillating = 0;
      }
    }
    prev_step = step;
    if (traj.damped) step *= 0.5;
    x += step;
    traj.rho.push_back(x);
    if (std::abs(step) < cfg.tol) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

LipschitzEstimate lipschitz_estimate(const AccuracyFunction& rho, int grid_resolution, int c) {
  if (grid_resolution < 2) throw ParameterError("lipschitz_estimate: resolution must be >= 2");
  if (c < 2) throw ParameterError("lipschitz_estimate: c must be >= 2");
  const double h = 1.0 / (grid_resolution - 1);
  double k_l = 0.0;
  for (int i = 0; i < grid_resolution; ++i) {
    for (int j = 0; j < grid_resolution; ++j) {
      const double d = i * h;
      const double g = j * h;
      const double v = rho(d, g);
      if (i + 1 < grid_resolution) k_l = std::max(k_l, std::abs(rho(d + h, g) - v) / h);
      if (j + 1 < grid_resolution) k_l = std::max(k_l, std::abs(rho(d, g + h) - v) / h);
    }
  }
  LipschitzEstimate est;
  est.k_l = k_l;
  est.composite = (1.0 + 1.0 / (c - 1.0)) * k_l;
  est.certified = k_l < 1.0 - 1.0 / c;
  return est;
}

FixedPointResult fixed_point(const AccuracyFunction& rho, const DynamicsConfig& cfg) {
  cfg.validate();
  FixedPointResult res;
  res.lipschitz = lipschitz_estimate(rho, 101, cfg.c);
  res.contraction_certified = res.lipschitz.certified;
  const Trajectory traj = iterate(rho, cfg);
  res.rho_final = traj.rho.back();
  res.iterations = static_cast<long>(traj.rho.size()) - 1;
  res.converged = traj.converged;
  if (!traj.converged)
    throw NumericalError("fixed_point: no convergence in " + std::to_string(cfg.max_iter) +
                         " iterations; last iterate " + std::to_string(res.rho_final));
  return res;
}

std::string Trajectory::to_csv() const {
  std::string out = "t,rho_t\n";
  char buf[32];
  for (size_t t = 0; t < rho.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    auto res = std::to_chars(buf, buf + sizeof(buf), rho[t]);
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

}  // namespace softlabel::dynamics
