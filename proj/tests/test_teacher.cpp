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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "softlabel/errors.hpp"
#include "softlabel/indicators.hpp"
#include "softlabel/teacher.hpp"

using namespace softlabel;
using teacher::LinearSoftmaxModel;
using teacher::TeacherLossConfig;

namespace {

double total_loss(const LinearSoftmaxModel& model, std::span<const double> x, int y,
                  const std::vector<int>& s_rnd, const TeacherLossConfig& cfg) {
  return teacher::loss_components(model.predict(x), y, s_rnd, cfg).total;
}

// Central finite differences of the total loss in weight space.
std::vector<double> fd_gradient(LinearSoftmaxModel model, std::span<const double> x, int y,
                                const std::vector<int>& s_rnd, const TeacherLossConfig& cfg,
                                double h) {
  std::vector<double> g(model.weights().size());
  for (size_t m = 0; m < g.size(); ++m) {
    const double keep = model.weights()[m];
    model.weights()[m] = keep + h;
    const double up = total_loss(model, x, y, s_rnd, cfg);
    model.weights()[m] = keep - h;
    const double down = total_loss(model, x, y, s_rnd, cfg);
    model.weights()[m] = keep;
    g[m] = (up - down) / (2 * h);
  }
  return g;
}

double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

// True when every indicator gate sits comfortably away from its boundary.
bool away_from_gate_boundaries(const SoftLabel& p, int y, int k) {
  std::vector<double> sorted(p.values);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (sorted[0] - sorted[1] < 1e-3) return false;        // argmax tie
  if (k < p.size() && sorted[static_cast<size_t>(k - 1)] - sorted[static_cast<size_t>(k)] < 1e-3)
    return false;  // top-k boundary tie
  (void)y;
  return true;
}

}  // namespace

TEST_CASE("loss gating wiring") {
  TeacherLossConfig cfg{0.3, 1.0, 2.0, 2, 2};
  SoftLabel out;
  out.values = {0.90, 0.05, 0.03, 0.02};

  // Output (nearly) one-hot at y: compensation off, punishment active.
  auto lb = teacher::loss_components(out, 0, {1, 2}, cfg);
  CHECK(lb.argmax_is_y);
  CHECK(lb.y_in_topk);
  CHECK(lb.pun == doctest::Approx(-lb.ce));
  CHECK(lb.comp == 0.0);

  // Truth outside the top-k: punishment off, compensation equals the CE.
  lb = teacher::loss_components(out, 3, {1, 2}, cfg);
  CHECK_FALSE(lb.argmax_is_y);
  CHECK_FALSE(lb.y_in_topk);
  CHECK(lb.pun == 0.0);
  CHECK(lb.comp == doctest::Approx(lb.ce));

  // All tradeoffs zero: the total collapses to the plain CE.
  TeacherLossConfig plain{0.0, 0.0, 0.0, 2, 2};
  lb = teacher::loss_components(out, 1, {2, 3}, plain);
  CHECK(lb.total == doctest::Approx(lb.ce));

  CHECK_THROWS_AS(teacher::loss_components(out, 1, {1, 2}, cfg), ParameterError);  // y in s_rnd
}

TEST_CASE("mean cross-entropy over the random labels reduces to the single-label case") {
  TeacherLossConfig cfg{0.0, 0.0, 1.0, 2, 1};
  SoftLabel out;
  out.values = {0.7, 0.2, 0.1};
  const auto lb = teacher::loss_components(out, 0, {2}, cfg);
  CHECK(lb.rnd == doctest::Approx(-std::log(0.1)));
}

TEST_CASE("analytic gradient matches finite differences away from gate boundaries") {
  SplitRng rng(31, 0);
  const int c = 6, f = 5;
  int accepted = 0;
  while (accepted < 100) {
    LinearSoftmaxModel model(c, f);
    for (auto& w : model.weights()) w = 0.6 * rng.gaussian();
    std::vector<double> x(f);
    for (auto& v : x) v = rng.gaussian();
    const int y = static_cast<int>(rng.uniform_below(c));
    std::vector<int> s_rnd;
    for (int i = 0; i < c && static_cast<int>(s_rnd.size()) < 2; ++i)
      if (i != y && rng.bernoulli(0.6)) s_rnd.push_back(i);
    if (static_cast<int>(s_rnd.size()) < 2) continue;
    TeacherLossConfig cfg{0.5 * rng.uniform01(), 1.5 * rng.uniform01(), 2.5 * rng.uniform01(),
                          1 + static_cast<int>(rng.uniform_below(c)), 2};
    if (!away_from_gate_boundaries(model.predict(x), y, cfg.k)) continue;
    ++accepted;
    const auto analytic = teacher::loss_gradient(model, x, y, s_rnd, cfg);
    const auto fd = fd_gradient(model, x, y, s_rnd, cfg, 1e-5);
    CHECK(rel_error(analytic, fd) <= 1e-5);
  }
}

TEST_CASE("one-sided differences at an argmax tie match one of the branch gradients") {
  // Zero weights: all logits equal, so argmax (tie rule) = label 0. Take
  // y = 0: nudging w[0][0] along +x flips the argmax gate across 0.
  const int c = 3, f = 1;
  LinearSoftmaxModel model(c, f);
  const std::vector<double> x{1.0};
  const int y = 0;
  const std::vector<int> s_rnd{1};
  TeacherLossConfig cfg{0.8, 0.0, 0.0, 1, 1};

  // Branch gradients: gate on (argmax = y) and gate off.
  const auto grad_on = teacher::loss_gradient(model, x, y, s_rnd, cfg);  // tie resolves to y
  TeacherLossConfig no_pun = cfg;
  no_pun.alpha1 = 0.0;
  const auto grad_off = teacher::loss_gradient(model, x, y, s_rnd, no_pun);

  const double h = 1e-6;
  auto one_sided = [&](double sign) {
    LinearSoftmaxModel m = model;
    std::vector<double> g(m.weights().size());
    for (size_t i = 0; i < g.size(); ++i) {
      const double base = total_loss(model, x, y, s_rnd, cfg);
      m.weights()[i] += sign * h;
      g[i] = (total_loss(m, x, y, s_rnd, cfg) - base) / (sign * h);
      m.weights()[i] -= sign * h;
    }
    return g;
  };
  const auto fwd = one_sided(+1.0);
  // Perturbing any single weight upward: for w[0][*] the argmax stays 0
  // (gate on); the forward difference must match one branch to O(h).
  const double err_on = rel_error(fwd, grad_on);
  const double err_off = rel_error(fwd, grad_off);
  CHECK(std::min(err_on, err_off) < 1e-3);
}

TEST_CASE("alpha = 0 training equals plain cross-entropy training") {
  teacher::BlobSpec blobs{4, 4, 30, 3.0, 1.0};
  const auto data = teacher::make_blobs(blobs, SplitRng(41, 0));
  TeacherLossConfig cfg{0.0, 0.0, 0.0, 2, 1};
  const auto run = teacher::train_tiny_teacher(data, cfg, 40, 0.5, SplitRng(42, 0));
  const auto plain = teacher::train_student_onehot(data, 40, 0.5);
  for (size_t i = 0; i < plain.weights().size(); ++i)
    CHECK(run.model.weights()[i] == doctest::Approx(plain.weights()[i]).epsilon(1e-12));
}

TEST_CASE("plain training on separable blobs reaches high accuracy") {
  teacher::BlobSpec blobs{5, 5, 40, 4.0, 1.0};
  const auto data = teacher::make_blobs(blobs, SplitRng(43, 0));
  TeacherLossConfig cfg{0.0, 0.0, 0.0, 1, 0};
  const auto run = teacher::train_tiny_teacher(data, cfg, 150, 1.0, SplitRng(44, 0));
  CHECK(run.top1_accuracy > 0.9);
  CHECK(run.report.delta < 0.1);
}

TEST_CASE("corruptor: delta 0 with k 1 gives one-hot truth") {
  std::vector<int> labels{0, 1, 2, 3, 4, 0, 1, 2};
  const auto ds = teacher::make_biased_soft_labels(labels, 5, 1, 0.0, std::nullopt,
                                                   SplitRng(51, 0));
  for (size_t i = 0; i < labels.size(); ++i)
    CHECK(ds.examples[i].soft == SoftLabel::one_hot(labels[static_cast<size_t>(i)], 5));
}

TEST_CASE("corruptor hits symmetric targets") {
  const int c = 10, k = 4;
  const long n = 100000;
  std::vector<int> labels(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = static_cast<int>(i % c);
  const auto ds = teacher::make_biased_soft_labels(labels, c, k, 0.3, std::nullopt,
                                                   SplitRng(52, 0));
  ds.validate();
  const double delta = indicators::estimate_delta(ds, k, indicators::Semantics::TopK);
  CHECK(std::abs(delta - 0.3) <= 3 * std::sqrt(0.3 * 0.7 / n));
  const auto g = indicators::estimate_gamma(ds, k, indicators::Semantics::TopK);
  CHECK(std::abs(g.gamma - 3.3 / 9.0) <= 0.01);
  // The truth lands in the top set on every reliable draw by construction;
  // y's rank is never 1 for k >= 2.
  long rank1 = 0;
  for (const auto& ex : ds.examples)
    if (top_k_set(ex.soft, 1).members[0] == ex.true_label) ++rank1;
  CHECK(rank1 == 0);
}

TEST_CASE("corruptor with a gamma target concentrates co-occurrence") {
  const int c = 10;
  const long n = 100000;
  std::vector<int> labels(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = static_cast<int>(i % c);
  // Table-style grid; k chosen per cell to make the target feasible.
  const struct { double delta, gamma; int k; } cells[] = {
      {0.1, 0.1, 1}, {0.3, 0.1, 1}, {0.5, 0.1, 1},
      {0.1, 0.3, 2}, {0.3, 0.3, 2}, {0.5, 0.3, 2},
      {0.1, 0.5, 2}, {0.3, 0.5, 2}, {0.5, 0.5, 2},
  };
  for (const auto& cell : cells) {
    CAPTURE(cell.delta);
    CAPTURE(cell.gamma);
    const auto ds = teacher::make_biased_soft_labels(labels, c, cell.k, cell.delta, cell.gamma,
                                                     SplitRng(53, 0));
    const double delta = indicators::estimate_delta(ds, cell.k, indicators::Semantics::TopK);
    const auto g = indicators::estimate_gamma(ds, cell.k, indicators::Semantics::TopK);
    CHECK(std::abs(delta - cell.delta) <= 0.01);
    CHECK(std::abs(g.gamma - cell.gamma) <= 0.02);
  }
}

TEST_CASE("corruptor rejects infeasible targets") {
  std::vector<int> labels{0, 1, 2};
  // k = 4: gamma below the symmetric floor (0.5+3)/9.
  CHECK_THROWS_AS(
      teacher::make_biased_soft_labels(labels, 10, 4, 0.5, 0.1, SplitRng(0, 0)),
      ParameterError);
  // k = 1: gamma above Delta.
  CHECK_THROWS_AS(
      teacher::make_biased_soft_labels(labels, 10, 1, 0.1, 0.3, SplitRng(0, 0)),
      ParameterError);
}

TEST_CASE("corruptor output satisfies the soft-label invariants") {
  SplitRng rng(54, 0);
  std::vector<int> labels(2000);
  for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 7);
  const auto ds = teacher::make_biased_soft_labels(labels, 7, 3, 0.25, std::nullopt, rng);
  ds.validate();
  for (const auto& ex : ds.examples) {
    const auto om = top_k_set(ex.soft, 3);
    CHECK(om.size() == 3);
    CHECK(support_set(ex.soft).members == om.members);
  }
}
