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
#include <vector>

#include "softlabel/indicators.hpp"
#include "softlabel/rng.hpp"
#include "softlabel/types.hpp"

namespace softlabel::teacher {

/// Tradeoff weights of the customized teacher objective
/// L = L_ce + a1*L_pun + a2*L_comp + a3*L_rnd.
struct TeacherLossConfig {
  double alpha1 = 0.0;  // punishment of correctly predicted instances
  double alpha2 = 0.0;  // compensation when the truth leaves the top-k set
  double alpha3 = 0.0;  // pull towards the fixed random labels
  int k = 4;
  int r = 3;  // number of random target labels per example

  void validate(int c) const;
};

/// Multiclass linear model with bias, normalized exponentially; weights are
/// row-major per class, c rows of (features + 1) entries.
class LinearSoftmaxModel {
 public:
  LinearSoftmaxModel(int classes, int features);

  int classes() const { return classes_; }
  int features() const { return features_; }
  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }

  std::vector<double> logits(std::span<const double> x) const;
  SoftLabel predict(std::span<const double> x) const;

 private:
  int classes_;
  int features_;
  std::vector<double> w_;
};

struct LossBreakdown {
  double ce = 0.0;
  double pun = 0.0;
  double comp = 0.0;
  double rnd = 0.0;
  double total = 0.0;
  bool argmax_is_y = false;
  bool y_in_topk = false;
};

/// Loss terms at one example given the model output. L_rnd is the mean
/// cross-entropy over the r random labels. Requires y not in s_rnd.
LossBreakdown loss_components(const SoftLabel& output, int y, const std::vector<int>& s_rnd,
                              const TeacherLossConfig& cfg);

/// Analytic gradient of the total loss w.r.t. the model weights, with the
/// indicator gates held constant at the current output (exact subgradient
/// away from gate boundaries).
std::vector<double> loss_gradient(const LinearSoftmaxModel& model, std::span<const double> x,
                                  int y, const std::vector<int>& s_rnd,
                                  const TeacherLossConfig& cfg);

/// Class-conditional spherical Gaussians. With features >= classes the blob
/// means sit at separation * e_class.
struct BlobSpec {
  int c = 10;
  int f = 10;
  int n_per_class = 100;
  double separation = 3.0;
  double sigma = 1.0;

  void validate() const;
};

struct BlobData {
  int c = 0;
  int f = 0;
  long n = 0;
  std::vector<double> x;  // row-major, n rows of f entries
  std::vector<int> y;

  std::span<const double> row(long i) const {
    return {x.data() + i * f, static_cast<size_t>(f)};
  }
};

BlobData make_blobs(const BlobSpec& spec, SplitRng rng);

struct TeacherRun {
  LinearSoftmaxModel model;
  SoftDataset outputs;  // soft labels the trained teacher assigns to the data
  indicators::IndicatorReport report;
  double top1_accuracy = 0.0;
  double final_loss = 0.0;
  std::vector<std::vector<int>> s_rnd;  // the per-example fixed random labels
};

/// Full-batch gradient descent on the customized objective; per-example
/// random label sets are drawn once up front and held fixed across epochs.
/// Throws NumericalError when the loss turns non-finite.
TeacherRun train_tiny_teacher(const BlobData& data, const TeacherLossConfig& cfg, int epochs,
                              double lr, SplitRng rng);

/// Constructive corruptor with target indicators. With probability 1-Delta
/// the truth is placed uniformly among ranks 2..k of the top set (rank 1 for
/// k = 1) and the other slots are wrong labels; with probability Delta the
/// truth is excluded. Masses follow a fixed strictly-decreasing template on
/// the top set and are zero outside. Without target_gamma wrong labels are
/// picked uniformly, giving gamma -> (Delta + k - 1)/(c - 1); with it, a
/// fixed decoy label (class 0) is forced in with the probability that drives
/// its co-occurrence to the target.
SoftDataset make_biased_soft_labels(const std::vector<int>& true_labels, int c, int k,
                                    double target_delta, std::optional<double> target_gamma,
                                    SplitRng rng);

/// Plain cross-entropy student on one-hot ground truth.
LinearSoftmaxModel train_student_onehot(const BlobData& data, int epochs, double lr);

/// Re-weighting student: gradient steps against soft targets, then the
/// targets are replaced by the student's own outputs zeroized outside the
/// teacher's top-k set and renormalized; repeated for outer_epochs rounds.
LinearSoftmaxModel train_student_reweighted(const BlobData& data, const SoftDataset& labels,
                                            int k, int outer_epochs, int inner_steps, double lr);

/// Top-1 accuracy of the model on labeled points (ties to the lowest index).
double model_accuracy(const LinearSoftmaxModel& model, const BlobData& data);

}  // namespace softlabel::teacher
