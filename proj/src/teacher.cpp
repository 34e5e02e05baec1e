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

#include "softlabel/teacher.hpp"

#include <algorithm>
#include <cmath>

#include "softlabel/errors.hpp"

namespace softlabel::teacher {

namespace {

int argmax_label(const SoftLabel& d) {
  int best = 0;
  for (int i = 1; i < d.size(); ++i)
    if (d[i] > d[best]) best = i;
  return best;
}

double cross_entropy(const SoftLabel& p, int label) {
  return -std::log(std::max(p[label], 1e-300));
}

/// m distinct uniform picks from pool (partial Fisher-Yates; pool is copied).
std::vector<int> pick_distinct(std::vector<int> pool, int m, SplitRng& rng) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(m));
  for (int t = 0; t < m; ++t) {
    const size_t j = t + rng.uniform_below(pool.size() - t);
    std::swap(pool[t], pool[j]);
    out.push_back(pool[t]);
  }
  return out;
}

std::vector<int> wrong_labels(int c, int y) {
  std::vector<int> pool;
  pool.reserve(static_cast<size_t>(c - 1));
  for (int i = 0; i < c; ++i)
    if (i != y) pool.push_back(i);
  return pool;
}

}  // namespace

void TeacherLossConfig::validate(int c) const {
  if (alpha1 < 0.0 || alpha2 < 0.0 || alpha3 < 0.0 || !std::isfinite(alpha1 + alpha2 + alpha3))
    throw ParameterError("teacher: tradeoff weights must be finite and >= 0");
  if (k < 1 || k > c) throw ParameterError("teacher: requires 1 <= k <= c");
  if (r < 0 || r > c - 1) throw ParameterError("teacher: requires 0 <= r <= c-1");
}

LinearSoftmaxModel::LinearSoftmaxModel(int classes, int features)
    : classes_(classes), features_(features),
      w_(static_cast<size_t>(classes) * (features + 1), 0.0) {
  if (classes < 2 || features < 1)
    throw ParameterError("model: needs >= 2 classes and >= 1 feature");
}

std::vector<double> LinearSoftmaxModel::logits(std::span<const double> x) const {
  std::vector<double> z(static_cast<size_t>(classes_));
  for (int j = 0; j < classes_; ++j) {
    const double* row = w_.data() + static_cast<size_t>(j) * (features_ + 1);
    double acc = row[features_];  // bias
    for (int m = 0; m < features_; ++m) acc += row[m] * x[static_cast<size_t>(m)];
    z[static_cast<size_t>(j)] = acc;
  }
  return z;
}

SoftLabel LinearSoftmaxModel::predict(std::span<const double> x) const {
  auto z = logits(x);
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
  SoftLabel out;
  out.values = std::move(z);
  return out;
}

LossBreakdown loss_components(const SoftLabel& output, int y, const std::vector<int>& s_rnd,
                              const TeacherLossConfig& cfg) {
  const int c = output.size();
  cfg.validate(c);
  if (static_cast<int>(s_rnd.size()) != cfg.r)
    throw ParameterError("loss_components: |s_rnd| must equal r");
  for (int i : s_rnd)
    if (i == y) throw ParameterError("loss_components: y must not be in s_rnd");
  LossBreakdown lb;
  lb.ce = cross_entropy(output, y);
  lb.argmax_is_y = argmax_label(output) == y;
  lb.y_in_topk = top_k_set(output, cfg.k).contains(y);
  lb.pun = lb.argmax_is_y ? -lb.ce : 0.0;
  lb.comp = lb.y_in_topk ? 0.0 : lb.ce;
  if (!s_rnd.empty()) {
    for (int i : s_rnd) lb.rnd += cross_entropy(output, i);
    lb.rnd /= static_cast<double>(s_rnd.size());
  }
  lb.total = lb.ce + cfg.alpha1 * lb.pun + cfg.alpha2 * lb.comp + cfg.alpha3 * lb.rnd;
  return lb;
}

std::vector<double> loss_gradient(const LinearSoftmaxModel& model, std::span<const double> x,
                                  int y, const std::vector<int>& s_rnd,
                                  const TeacherLossConfig& cfg) {
  const int c = model.classes();
  const int f = model.features();
  const SoftLabel p = model.predict(x);
  const LossBreakdown lb = loss_components(p, y, s_rnd, cfg);

  // d(total)/d(logit) = w_y * (p - e_y) + alpha3 * (p - u_rnd), with the
  // gates frozen at the current output.
  const double w_y = 1.0 - (lb.argmax_is_y ? cfg.alpha1 : 0.0) + (lb.y_in_topk ? 0.0 : cfg.alpha2);
  std::vector<double> glogit(static_cast<size_t>(c));
  for (int j = 0; j < c; ++j)
    glogit[static_cast<size_t>(j)] = (w_y + cfg.alpha3) * p[j];
  glogit[static_cast<size_t>(y)] -= w_y;
  if (!s_rnd.empty()) {
    const double share = cfg.alpha3 / static_cast<double>(s_rnd.size());
    for (int i : s_rnd) glogit[static_cast<size_t>(i)] -= share;
  }

  std::vector<double> grad(static_cast<size_t>(c) * (f + 1), 0.0);
  for (int j = 0; j < c; ++j) {
    double* row = grad.data() + static_cast<size_t>(j) * (f + 1);
    const double g = glogit[static_cast<size_t>(j)];
    for (int m = 0; m < f; ++m) row[m] = g * x[static_cast<size_t>(m)];
    row[f] = g;
  }
  return grad;
}

void BlobSpec::validate() const {
  if (c < 2 || f < 1 || n_per_class < 1)
    throw ParameterError("blobs: need c >= 2, f >= 1, n_per_class >= 1");
  if (f < c) throw ParameterError("blobs: needs f >= c to place one-hot means");
  if (!(sigma > 0.0) || !(separation >= 0.0))
    throw ParameterError("blobs: sigma > 0 and separation >= 0 required");
}

BlobData make_blobs(const BlobSpec& spec, SplitRng rng) {
  spec.validate();
  BlobData data;
  data.c = spec.c;
  data.f = spec.f;
  data.n = static_cast<long>(spec.c) * spec.n_per_class;
  data.x.resize(static_cast<size_t>(data.n) * spec.f);
  data.y.resize(static_cast<size_t>(data.n));
  long idx = 0;
  for (int cls = 0; cls < spec.c; ++cls) {
    for (int s = 0; s < spec.n_per_class; ++s, ++idx) {
      SplitRng ex_rng = rng.substream(static_cast<uint64_t>(idx));
      double* row = data.x.data() + static_cast<size_t>(idx) * spec.f;
      for (int m = 0; m < spec.f; ++m)
        row[m] = (m == cls ? spec.separation : 0.0) + ex_rng.gaussian(spec.sigma);
      data.y[static_cast<size_t>(idx)] = cls;
    }
  }
  return data;
}

TeacherRun train_tiny_teacher(const BlobData& data, const TeacherLossConfig& cfg, int epochs,
                              double lr, SplitRng rng) {
  cfg.validate(data.c);
  if (epochs < 1 || !(lr > 0.0)) throw ParameterError("teacher: epochs >= 1 and lr > 0 required");

  // Random target labels, fixed for the whole run.
  std::vector<std::vector<int>> s_rnd(static_cast<size_t>(data.n));
  for (long i = 0; i < data.n; ++i) {
    SplitRng ex_rng = rng.substream(static_cast<uint64_t>(i));
    s_rnd[static_cast<size_t>(i)] =
        pick_distinct(wrong_labels(data.c, data.y[static_cast<size_t>(i)]), cfg.r, ex_rng);
  }

  LinearSoftmaxModel model(data.c, data.f);
  const size_t wsize = model.weights().size();
  std::vector<double> grad(wsize);
  double epoch_loss = 0.0;
  for (int e = 0; e < epochs; ++e) {
    std::fill(grad.begin(), grad.end(), 0.0);
    epoch_loss = 0.0;
    for (long i = 0; i < data.n; ++i) {
      const auto gi =
          loss_gradient(model, data.row(i), data.y[static_cast<size_t>(i)],
                        s_rnd[static_cast<size_t>(i)], cfg);
      for (size_t m = 0; m < wsize; ++m) grad[m] += gi[m];
      epoch_loss += loss_components(model.predict(data.row(i)), data.y[static_cast<size_t>(i)],
                                    s_rnd[static_cast<size_t>(i)], cfg)
                        .total;
    }
    if (!std::isfinite(epoch_loss))
      throw NumericalError("teacher: loss diverged (non-finite); try a smaller lr");
    const double step = lr / static_cast<double>(data.n);
    auto& w = model.weights();
    for (size_t m = 0; m < wsize; ++m) w[m] -= step * grad[m];
  }

  TeacherRun run{std::move(model), {}, {}, 0.0, epoch_loss / static_cast<double>(data.n),
                 std::move(s_rnd)};
  run.outputs.c = data.c;
  run.outputs.examples.reserve(static_cast<size_t>(data.n));
  for (long i = 0; i < data.n; ++i) {
    LabeledExample ex;
    ex.id = "e" + std::to_string(i);
    ex.true_label = data.y[static_cast<size_t>(i)];
    ex.soft = run.model.predict(data.row(i));
    run.outputs.examples.push_back(std::move(ex));
  }
  run.report = indicators::analyze(run.outputs, cfg.k, indicators::Semantics::TopK);
  run.top1_accuracy = run.report.top1_accuracy;
  return run;
}

SoftDataset make_biased_soft_labels(const std::vector<int>& true_labels, int c, int k,
                                    double target_delta, std::optional<double> target_gamma,
                                    SplitRng rng) {
  if (c < 2 || k < 1 || k > c - 1)
    throw ParameterError("make_biased_soft_labels: requires 1 <= k <= c-1");
  if (!(target_delta >= 0.0 && target_delta <= 1.0))
    throw ParameterError("make_biased_soft_labels: target Delta must lie in [0,1]");
  const double symmetric_gamma = (target_delta + k - 1) / (c - 1.0);
  double decoy_prob = 0.0;
  const int decoy = 0;
  if (target_gamma) {
    if (k == 1) {
      // Only the Delta branch carries a wrong label, so the co-occurrence of
      // the decoy is Delta * decoy_prob.
      if (*target_gamma > target_delta || *target_gamma < target_delta / (c - 1.0))
        throw ParameterError(
            "make_biased_soft_labels: with k = 1 the target gamma must lie in "
            "[Delta/(c-1), Delta]");
      decoy_prob = target_delta > 0.0 ? *target_gamma / target_delta : 0.0;
    } else if (k > c - 2) {
      throw ParameterError(
          "make_biased_soft_labels: gamma targeting needs k <= c-2 so the "
          "decoy can be left out");
    } else {
      if (*target_gamma < symmetric_gamma || *target_gamma > 1.0)
        throw ParameterError(
            "make_biased_soft_labels: target gamma below the symmetric value "
            "(Delta+k-1)/(c-1); a fixed-size top set cannot go lower");
      decoy_prob = *target_gamma;
    }
  }

  // Strictly decreasing mass template over the ranks; zero outside the set.
  std::vector<double> mass(static_cast<size_t>(k));
  for (int r = 0; r < k; ++r) mass[static_cast<size_t>(r)] = 2.0 * (k - r) / (k * (k + 1.0));

  SoftDataset ds;
  ds.c = c;
  ds.examples.reserve(true_labels.size());
  for (size_t idx = 0; idx < true_labels.size(); ++idx) {
    const int y = true_labels[idx];
    if (y < 0 || y >= c) throw ParameterError("make_biased_soft_labels: label out of range");
    SplitRng ex_rng = rng.substream(idx);
    const bool reliable = ex_rng.bernoulli(1.0 - target_delta);
    const int wrong_slots = reliable ? k - 1 : k;

    std::vector<int> pool = wrong_labels(c, y);
    std::vector<int> wrongs;
    if (target_gamma && y != decoy && wrong_slots >= 1 && ex_rng.bernoulli(decoy_prob)) {
      wrongs.push_back(decoy);
      pool.erase(std::find(pool.begin(), pool.end(), decoy));
      auto rest = pick_distinct(std::move(pool), wrong_slots - 1, ex_rng);
      wrongs.insert(wrongs.end(), rest.begin(), rest.end());
    } else {
      if (target_gamma && y != decoy)
        pool.erase(std::find(pool.begin(), pool.end(), decoy));
      wrongs = pick_distinct(std::move(pool), wrong_slots, ex_rng);
    }
    // Random rank order for the wrong labels; the truth, when kept, lands
    // uniformly on ranks 2..k (rank 1 when k == 1).
    std::vector<int> ranked(static_cast<size_t>(k));
    if (reliable) {
      const int y_rank =
          k == 1 ? 0 : 1 + static_cast<int>(ex_rng.uniform_below(static_cast<uint64_t>(k - 1)));
      auto shuffled = pick_distinct(std::move(wrongs), wrong_slots, ex_rng);
      int take = 0;
      for (int r = 0; r < k; ++r)
        ranked[static_cast<size_t>(r)] = r == y_rank ? y : shuffled[static_cast<size_t>(take++)];
    } else {
      ranked = pick_distinct(std::move(wrongs), wrong_slots, ex_rng);
    }

    LabeledExample ex;
    ex.id = "e" + std::to_string(idx);
    ex.true_label = y;
    ex.soft.values.assign(static_cast<size_t>(c), 0.0);
    for (int r = 0; r < k; ++r)
      ex.soft.values[static_cast<size_t>(ranked[static_cast<size_t>(r)])] =
          mass[static_cast<size_t>(r)];
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

namespace {

/// Full-batch gradient descent against per-example soft targets.
void descend(LinearSoftmaxModel& model, const BlobData& data,
             const std::vector<std::vector<double>>& targets, int steps, double lr) {
  const int c = model.classes();
  const int f = model.features();
  const size_t wsize = model.weights().size();
  std::vector<double> grad(wsize);
  for (int s = 0; s < steps; ++s) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (long i = 0; i < data.n; ++i) {
      const SoftLabel p = model.predict(data.row(i));
      const auto& t = targets[static_cast<size_t>(i)];
      const auto x = data.row(i);
      for (int j = 0; j < c; ++j) {
        const double g = p[j] - t[static_cast<size_t>(j)];
        double* row = grad.data() + static_cast<size_t>(j) * (f + 1);
        for (int m = 0; m < f; ++m) row[m] += g * x[static_cast<size_t>(m)];
        row[f] += g;
      }
    }
    const double step = lr / static_cast<double>(data.n);
    auto& w = model.weights();
    for (size_t m = 0; m < wsize; ++m) w[m] -= step * grad[m];
  }
}

}  // namespace

LinearSoftmaxModel train_student_onehot(const BlobData& data, int epochs, double lr) {
  std::vector<std::vector<double>> targets(static_cast<size_t>(data.n));
  for (long i = 0; i < data.n; ++i) {
    targets[static_cast<size_t>(i)].assign(static_cast<size_t>(data.c), 0.0);
    targets[static_cast<size_t>(i)][static_cast<size_t>(data.y[static_cast<size_t>(i)])] = 1.0;
  }
  LinearSoftmaxModel model(data.c, data.f);
  descend(model, data, targets, epochs, lr);
  return model;
}

LinearSoftmaxModel train_student_reweighted(const BlobData& data, const SoftDataset& labels,
                                            int k, int outer_epochs, int inner_steps,
                                            double lr) {
  if (labels.size() != data.n)
    throw ParameterError("student: labels and data sizes differ");
  const int c = labels.c;
  std::vector<uint32_t> masks(static_cast<size_t>(data.n));
  std::vector<std::vector<double>> targets(static_cast<size_t>(data.n));
  for (long i = 0; i < data.n; ++i) {
    const auto& soft = labels.examples[static_cast<size_t>(i)].soft;
    masks[static_cast<size_t>(i)] = top_k_set(soft, k).mask();
    auto& t = targets[static_cast<size_t>(i)];
    t.assign(static_cast<size_t>(c), 0.0);
    double sum = 0.0;
    for (int j = 0; j < c; ++j)
      if (masks[static_cast<size_t>(i)] & (1u << j)) {
        t[static_cast<size_t>(j)] = soft[j];
        sum += soft[j];
      }
    for (double& v : t) v = sum > 0.0 ? v / sum : 1.0 / k;
  }

  LinearSoftmaxModel model(data.c, data.f);
  for (int round = 0; round < outer_epochs; ++round) {
    descend(model, data, targets, inner_steps, lr);
    for (long i = 0; i < data.n; ++i) {
      const SoftLabel p = model.predict(data.row(i));
      auto& t = targets[static_cast<size_t>(i)];
      double sum = 0.0;
      for (int j = 0; j < c; ++j) {
        t[static_cast<size_t>(j)] = (masks[static_cast<size_t>(i)] & (1u << j)) ? p[j] : 0.0;
        sum += t[static_cast<size_t>(j)];
      }
      for (double& v : t) v = sum > 0.0 ? v / sum : 1.0 / k;
    }
  }
  return model;
}

double model_accuracy(const LinearSoftmaxModel& model, const BlobData& data) {
  long hits = 0;
  for (long i = 0; i < data.n; ++i)
    if (argmax_label(model.predict(data.row(i))) == data.y[static_cast<size_t>(i)]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.n);
}

}  // namespace softlabel::teacher
