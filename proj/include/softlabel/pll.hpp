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

namespace softlabel::pll {

struct CandidateExample {
  std::string id;
  int true_label = 0;
  std::vector<int> candidates;  // sorted ascending, nonempty

  bool operator==(const CandidateExample&) const = default;
};

/// Partial rate eta (per-wrong-label inclusion probability) and unreliable
/// rate mu (probability the truth is dropped from the set).
struct PLLSpec {
  double eta = 0.0;
  double mu = 0.0;
  int c = 2;

  void validate() const;
};

/// Per example: include the truth with probability 1-mu and each wrong label
/// independently with probability eta; empty sets redraw the wrong-label
/// inclusions (truth decision fixed) until nonempty. At eta == 0 exactly the
/// nonemptiness conditioning degenerates to a single uniform wrong label.
std::vector<CandidateExample> generate_candidates(const std::vector<int>& true_labels,
                                                  const PLLSpec& spec, SplitRng rng);

/// Uniform mass over the candidate set; support_set inverts it exactly.
LabeledExample candidates_to_soft(const CandidateExample& ex, int c);

SoftDataset candidates_to_dataset(const std::vector<CandidateExample>& exs, int c);

struct CandidateDataset {
  int c = 0;
  std::vector<CandidateExample> examples;
};

/// Candidate-set JSONL: {"id": ..., "y": ..., "s": [...]} rows with an
/// optional {"c": <int>} header line.
CandidateDataset load_candidates(const std::string& path);
void save_candidates(const CandidateDataset& ds, const std::string& path);

/// Expected gamma of the generation protocol including the nonemptiness
/// redraw correction (the plain rate would be exactly eta).
double predicted_gamma(const PLLSpec& spec);

struct Corollary1Report {
  PLLSpec spec;
  long n = 0;
  double delta_hat = 0.0;
  double gamma_hat = 0.0;
  double delta_se = 0.0;
  double gamma_se = 0.0;
  std::vector<double> per_label_cooccurrence;
  double predicted_gamma = 0.0;
  double predicted_gamma_bias = 0.0;  // predicted_gamma - eta
  /// Set when the redraw correction is no longer negligible (predicted bias
  /// above 0.01, or the eta == 0 limit); gamma_hat == eta is not expected
  /// to hold there.
  bool degenerate_redraw_regime = false;
  double delta_deviation = 0.0;  // |delta_hat - mu|
  double gamma_deviation = 0.0;  // |gamma_hat - eta|

  std::string to_json() const;
};

/// Generates, converts, measures (support semantics) and compares against
/// Corollary 1's Delta = mu, gamma = eta.
Corollary1Report verify_corollary1(const PLLSpec& spec, long n, RandomSeed seed);

}  // namespace softlabel::pll
