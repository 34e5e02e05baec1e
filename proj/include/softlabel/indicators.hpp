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

#include <optional>
#include <string>
#include <vector>

#include "softlabel/types.hpp"

namespace softlabel::indicators {

/// Which label set plays the role of Omega: the k highest-mass labels, or the
/// support of the soft label (candidate-set data).
enum class Semantics { TopK, Support };

Semantics semantics_from_string(const std::string& s);
std::string to_string(Semantics s);

struct GammaEstimate {
  double gamma = 0.0;
  /// Per-label empirical Pr(i in Omega | i != y); NaN for excluded labels.
  std::vector<double> per_label;
  /// Labels never observed with y != i; excluded from the max with a warning.
  std::vector<int> excluded_labels;
};

/// Effectiveness indicators of one dataset at one cardinality k.
struct IndicatorReport {
  int c = 0;
  long n = 0;
  int k = 0;
  Semantics semantics = Semantics::TopK;
  double delta = 0.0;
  double gamma = 0.0;
  std::vector<double> per_label_cooccurrence;
  std::vector<int> excluded_labels;
  double topk_accuracy = 0.0;  // 1 - delta
  double top1_accuracy = 0.0;
  double consistency_margin = 0.0;
  bool consistent = false;
  std::optional<double> theta;  // defined only when delta + gamma < 1

  std::string to_json() const;
  /// One-row CSV (header + row): k,delta,gamma,top1_acc,topk_acc,margin,theta.
  std::string to_csv() const;
};

/// Fraction of examples whose true label falls outside Omega.
double estimate_delta(const SoftDataset& ds, int k, Semantics semantics);

/// Max over labels of the empirical co-occurrence ratio
/// #{x : i in Omega, y != i} / #{x : y != i}; the plug-in for the sup.
GammaEstimate estimate_gamma(const SoftDataset& ds, int k, Semantics semantics);

struct ConsistencyResult {
  bool consistent = false;
  /// (1-Delta) - (gamma(1-Delta) + Delta): the gap between the true-label
  /// risk coefficient and the wrong-label coefficient bound.
  double margin = 0.0;
};

ConsistencyResult consistency_check(double delta, double gamma);

IndicatorReport analyze(const SoftDataset& ds, int k, Semantics semantics);

}  // namespace softlabel::indicators
