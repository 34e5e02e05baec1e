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

#include "softlabel/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "softlabel/errors.hpp"

namespace softlabel {

SoftLabel SoftLabel::one_hot(int label, int c) {
  SoftLabel d;
  d.values.assign(static_cast<size_t>(c), 0.0);
  d.values[static_cast<size_t>(label)] = 1.0;
  return d;
}

SoftLabel SoftLabel::uniform(int c) {
  SoftLabel d;
  d.values.assign(static_cast<size_t>(c), 1.0 / c);
  return d;
}

void SoftLabel::validate(int c, const std::string& who) const {
  const std::string tag = who.empty() ? "soft label" : "soft label '" + who + "'";
  if (size() != c)
    throw ValidationError(tag + ": has " + std::to_string(size()) + " entries, expected " +
                          std::to_string(c));
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError(tag + ": entry " + std::to_string(v) + " outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSoftLabelSumTol)
    throw ValidationError(tag + ": entries sum to " + std::to_string(sum) +
                          ", violating the 1e-9 tolerance");
}

void SoftDataset::validate() const {
  if (c < 2) throw ValidationError("dataset: class count must be >= 2");
  std::unordered_set<std::string> seen;
  seen.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.true_label < 0 || ex.true_label >= c)
      throw ValidationError("example '" + ex.id + "': true label " +
                            std::to_string(ex.true_label) + " outside {0,...," +
                            std::to_string(c - 1) + "}");
    ex.soft.validate(c, ex.id);
    if (!seen.insert(ex.id).second)
      throw ValidationError("duplicate example id '" + ex.id + "'");
  }
}

bool TopKSet::contains(int label) const {
  return std::binary_search(members.begin(), members.end(), label);
}

uint32_t TopKSet::mask() const {
  uint32_t m = 0;
  for (int i : members) m |= (1u << i);
  return m;
}

TopKSet top_k_set(const SoftLabel& d, int k) {
  const int c = d.size();
  if (k < 1 || k > c)
    throw ParameterError("top_k_set: k = " + std::to_string(k) + " outside [1," +
                         std::to_string(c) + "]");
  std::vector<int> idx(static_cast<size_t>(c));
  std::iota(idx.begin(), idx.end(), 0);
  // Stable under the (mass desc, index asc) order; iota gives index asc.
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return d.values[static_cast<size_t>(a)] >
                                              d.values[static_cast<size_t>(b)]; });
  TopKSet out;
  out.k = k;
  out.members.assign(idx.begin(), idx.begin() + k);
  std::sort(out.members.begin(), out.members.end());
  return out;
}

TopKSet support_set(const SoftLabel& d) {
  TopKSet out;
  for (int i = 0; i < d.size(); ++i)
    if (d.values[static_cast<size_t>(i)] > 0.0) out.members.push_back(i);
  out.k = out.size();
  return out;
}

}  // namespace softlabel
