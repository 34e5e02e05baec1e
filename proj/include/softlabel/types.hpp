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

namespace softlabel {

/// Absolute tolerance on the sum of a soft label's entries.
inline constexpr double kSoftLabelSumTol = 1e-9;

/// A probability vector over c class labels.
struct SoftLabel {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }

  static SoftLabel one_hot(int label, int c);
  static SoftLabel uniform(int c);

  /// Throws ValidationError unless entries lie in [0,1] and sum to 1 within
  /// kSoftLabelSumTol; `who` names the offender in the message.
  void validate(int c, const std::string& who = "") const;

  bool operator==(const SoftLabel&) const = default;
};

struct LabeledExample {
  std::string id;
  int true_label = 0;
  SoftLabel soft;

  bool operator==(const LabeledExample&) const = default;
};

struct SoftDataset {
  int c = 0;
  std::vector<LabeledExample> examples;

  int size() const { return static_cast<int>(examples.size()); }

  /// Checks class count, per-example label range, soft-label invariants and
  /// id uniqueness. Throws ValidationError.
  void validate() const;

  bool operator==(const SoftDataset&) const = default;
};

/// A set of class indices; either the k highest-mass labels of a soft label
/// or its support. Members are kept sorted ascending.
struct TopKSet {
  std::vector<int> members;
  int k = 0;

  bool contains(int label) const;
  int size() const { return static_cast<int>(members.size()); }

  /// Membership bitmask (requires all members < 32).
  uint32_t mask() const;

  bool operator==(const TopKSet&) const = default;
};

/// The k indices with largest mass; ties broken by ascending class index.
TopKSet top_k_set(const SoftLabel& d, int k);

/// Indices with strictly positive mass (exact zero test).
TopKSet support_set(const SoftLabel& d);

}  // namespace softlabel
