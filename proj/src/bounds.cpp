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

#include "softlabel/bounds.hpp"

#include <cmath>

#include "softlabel/errors.hpp"

namespace softlabel::bounds {

namespace {

// Rate at which the derivation-variant bound decays per sample.
long double decay_rate(const BoundParams& p) {
  const long double th = theta(p.delta_u, p.gamma_a);
  return th * p.eps / 2.0L + std::log(1.0L / (2.0L - 2.0L * p.delta_u));
}

}  // namespace

void BoundParams::validate() const {
  if (!(delta_u > 0.0 && delta_u < 1.0))
    throw ParameterError("bounds: Delta must lie in (0,1)");
  if (!(gamma_a > 0.0 && gamma_a < 1.0))
    throw ParameterError("bounds: gamma must lie in (0,1)");
  if (!(delta_u + gamma_a < 1.0))
    throw ParameterError("bounds: requires Delta + gamma < 1");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("bounds: eps must lie in (0,1)");
  if (!(conf > 0.0 && conf < 1.0)) throw ParameterError("bounds: conf must lie in (0,1)");
  if (d_h < 1) throw ParameterError("bounds: Natarajan dimension must be positive");
  if (labels < 2) throw ParameterError("bounds: label cardinality must be >= 2");
}

double theta(double delta_u, double gamma_a) {
  if (!(delta_u < 1.0) || !(delta_u + gamma_a < 1.0))
    throw ParameterError("theta undefined: Delta+gamma >= 1");
  return std::log(2.0 * (1.0 - delta_u) / (1.0 - delta_u + gamma_a));
}

BoundVariant variant_from_string(const std::string& s) {
  if (s == "statement") return BoundVariant::Statement;
  if (s == "derivation") return BoundVariant::Derivation;
  throw ParameterError("unknown bound variant '" + s + "'");
}

std::string to_string(BoundVariant v) {
  return v == BoundVariant::Statement ? "statement" : "derivation";
}

BoundValue failure_prob_bound(long n, const BoundParams& p, BoundVariant variant) {
  p.validate();
  if (n < 1) throw ParameterError("failure_prob_bound: n must be >= 1");
  const long double th = theta(p.delta_u, p.gamma_a);
  const long double d = p.d_h;
  const long double log_l = std::log(static_cast<long double>(p.labels));
  const long double log2 = 0.693147180559945309417L;
  BoundValue out;
  if (variant == BoundVariant::Statement) {
    // (2n)^d * L^(2d) * exp(-n*theta*eps/2)
    const long double lb = d * std::log(2.0L * n) + 2.0L * d * log_l - n * th * p.eps / 2.0L;
    out.log_bound = static_cast<double>(lb);
    out.rate = static_cast<double>(th * p.eps / 2.0L);
    out.vacuous = false;
  } else {
    // 2^(d+1) * n^d * L^(2d) * (2-2Delta)^n * exp(-n*theta*eps/2)
    const long double lb = (d + 1.0L) * log2 + d * std::log(static_cast<long double>(n)) +
                           2.0L * d * log_l + n * std::log(2.0L - 2.0L * p.delta_u) -
                           n * th * p.eps / 2.0L;
    out.log_bound = static_cast<double>(lb);
    out.rate = static_cast<double>(decay_rate(p));
    out.vacuous = out.rate <= 0.0;
  }
  return out;
}

SampleComplexity sample_complexity(const BoundParams& p) {
  p.validate();
  const long double rate = decay_rate(p);
  if (!(rate > 0.0L))
    throw ParameterError("sample_complexity: bound vacuous for (Delta, gamma, eps)");
  const long double d = p.d_h;
  const long double bracket = d * (std::log(2.0L * d) + std::log(1.0L / rate) +
                                   2.0L * std::log(static_cast<long double>(p.labels))) +
                              std::log(1.0L / p.conf) + 1.0L;
  const long double n0 = 2.0L / rate * bracket;
  if (!(n0 > 0.0L))
    throw ParameterError("sample_complexity: bound vacuous for (Delta, gamma, eps)");
  SampleComplexity out;
  out.n0 = static_cast<double>(n0);
  out.effective_n0 =
      std::max(out.n0, static_cast<double>(8.0L * 0.693147180559945309417L / p.eps));
  out.theta = theta(p.delta_u, p.gamma_a);
  out.rate = static_cast<double>(rate);
  return out;
}

}  // namespace softlabel::bounds
