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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "softlabel/bounds.hpp"
#include "softlabel/indicators.hpp"
#include "softlabel/noise.hpp"
#include "softlabel/rng.hpp"
#include "softlabel/types.hpp"

namespace softlabel::ermsim {

// Exhaustive-search guardrails.
inline constexpr long kMaxClassSize = 1'000'000;
inline constexpr int kMaxPoolSize = 64;
inline constexpr int kMaxShatterCap = 12;

/// A finite multiclass hypothesis class over a finite pool of scalar
/// instances; every hypothesis is materialized as its label vector.
struct HypothesisClass {
  enum class Kind { ExplicitTable, IntervalMulticlass };

  Kind kind = Kind::ExplicitTable;
  int c = 2;
  std::vector<double> pool;
  std::vector<std::vector<uint8_t>> hypotheses;

  long size() const { return static_cast<long>(hypotheses.size()); }
  int pool_size() const { return static_cast<int>(pool.size()); }
  void validate() const;

  static HypothesisClass explicit_table(std::vector<double> pool, int c,
                                        std::vector<std::vector<uint8_t>> hypotheses);
  /// All c^|pool| total functions (guarded by kMaxClassSize).
  static HypothesisClass all_functions(std::vector<double> pool, int c);
  static HypothesisClass constants(std::vector<double> pool, int c);
  /// Piecewise-constant hypotheses with exactly `thresholds` cut points
  /// chosen among the pool midpoints and free segment labels; duplicates
  /// are removed, first enumeration kept.
  static HypothesisClass intervals(std::vector<double> pool, int thresholds, int c);
};

struct NatarajanResult {
  int dim = 0;
  /// The cap stopped the search while shattering still succeeded.
  bool lower_bound_only = false;
  std::vector<int> witness_points;  // indices into the pool
  std::vector<uint8_t> f1, f2;      // everywhere-disagreeing labelings of the witness
};

/// Brute-force Natarajan dimension: the largest m <= cap such that some
/// m-subset of the pool is N-shattered, checked exhaustively via the class's
/// traces on each subset.
NatarajanResult natarajan_dimension(const HypothesisClass& cls, int cap = kMaxShatterCap);

/// One training observation: a pool instance with its Omega label set.
struct PoolExample {
  int pool_index = 0;
  uint32_t omega = 0;  // bitmask over class labels
};

/// Exhaustive minimizer of the disagreement count #{i : h(x_i) not in
/// Omega_i}; ties go to the first hypothesis in enumeration order. An empty
/// training set returns hypothesis 0 (vacuous minimum).
long erm(const HypothesisClass& cls, std::span<const PoolExample> train);

/// Adapter from a soft dataset whose rows live on the pool.
std::vector<PoolExample> to_pool_examples(const SoftDataset& ds,
                                          std::span<const int> pool_indices, int k,
                                          indicators::Semantics semantics);

/// Weighted disagreement between two hypotheses over the pool distribution;
/// empty weights mean uniform.
double true_error(const HypothesisClass& cls, long h, long target,
                  std::span<const double> pool_weights = {});

// --- label mechanisms -------------------------------------------------------

struct CorruptorMech {
  double delta = 0.0;
  std::optional<double> gamma;
  int k = 1;
};

struct PllMech {
  double eta = 0.0;
  double mu = 0.0;
};

struct NoiseMech {
  noise::NoiseModel model;
  int k = 1;
};

/// Candidate sets that concentrate co-occurrence on one decoy label: the
/// truth is dropped with probability delta (the decoy present instead), and
/// the decoy also rides along with the probability that lifts its total
/// co-occurrence to gamma. Requires delta <= gamma.
struct AdversarialMech {
  double delta = 0.0;
  double gamma = 0.0;
  int decoy = 0;
};

using LabelMech = std::variant<CorruptorMech, PllMech, NoiseMech, AdversarialMech>;

/// Omega masks for a batch of true labels under a mechanism.
std::vector<uint32_t> apply_mechanism(const LabelMech& mech, const std::vector<int>& labels,
                                      int c, SplitRng rng);

/// The mechanism's analytic (Delta, gamma).
std::pair<double, double> mechanism_indicators(const LabelMech& mech, int c);

struct ExperimentSpec {
  long target = 0;  // index of the ground-truth hypothesis (realizable)
  LabelMech mech;
  std::vector<long> n_list;
  double eps = 0.5;
  double conf = 0.05;
  int trials = 200;
  RandomSeed seed;
  int d_h = 0;                       // 0 = brute force
  int labels_const = 0;              // L; 0 = c
  std::vector<double> pool_weights;  // empty = uniform
};

struct ExperimentRow {
  long n = 0;
  double failure_rate = 0.0;  // Pr(Err(A(z)) >= eps)
  double mean_true_error = 0.0;
  double bound_statement_log = 0.0;
  double bound_derivation_log = 0.0;
  bool bound_derivation_vacuous = false;
};

struct ExperimentReport {
  double mech_delta = 0.0;
  double mech_gamma = 0.0;
  bool theorem_region = false;  // Delta + gamma < 1
  int d_h = 0;
  std::optional<bounds::SampleComplexity> n0;
  std::vector<ExperimentRow> rows;

  std::string to_csv() const;  // n,failure_rate,n0,bound_statement,bound_derivation
};

ExperimentReport learnability_experiment(const HypothesisClass& cls, const ExperimentSpec& spec);

}  // namespace softlabel::ermsim
