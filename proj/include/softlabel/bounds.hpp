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

namespace softlabel::bounds {

/// Parameters of the sample-complexity machinery. Requires
/// 0 < delta_u, gamma_a < 1 and delta_u + gamma_a < 1.
struct BoundParams {
  double delta_u = 0.0;  // unreliability degree
  double gamma_a = 0.0;  // ambiguity degree
  double eps = 0.0;      // target generalization error
  double conf = 0.0;     // failure probability budget (the "delta" of PAC)
  int d_h = 1;           // Natarajan dimension of the hypothesis class
  int labels = 2;        // label-cardinality constant L (defaults to c)

  void validate() const;
};

/// theta = log(2(1-Delta) / (1-Delta+gamma)); requires Delta + gamma < 1.
double theta(double delta_u, double gamma_a);

/// Two published forms of the failure-probability bound that disagree by a
/// (2-2*Delta)^n factor; both are exposed rather than silently choosing.
enum class BoundVariant { Statement, Derivation };

BoundVariant variant_from_string(const std::string& s);
std::string to_string(BoundVariant v);

struct BoundValue {
  double log_bound = 0.0;  // natural log of the bound (raw value over/underflows)
  /// Per-sample decay rate theta*eps/2 + log(1/(2-2*Delta)) of the derivation
  /// variant; the statement variant's rate is theta*eps/2.
  double rate = 0.0;
  /// Set when the rate is <= 0 (derivation variant only): the bound then
  /// diverges with n and certifies nothing.
  bool vacuous = false;
};

BoundValue failure_prob_bound(long n, const BoundParams& p, BoundVariant variant);

struct SampleComplexity {
  double n0 = 0.0;
  double effective_n0 = 0.0;  // max(n0, 8*log(2)/eps)
  double theta = 0.0;
  double rate = 0.0;
};

/// The displayed n0 formula. Throws ParameterError in the vacuous regime
/// (rate <= 0) or when the formula yields a non-positive n0.
SampleComplexity sample_complexity(const BoundParams& p);

}  // namespace softlabel::bounds
