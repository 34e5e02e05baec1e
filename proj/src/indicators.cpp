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

#include "softlabel/indicators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "softlabel/bounds.hpp"
#include "softlabel/errors.hpp"

namespace softlabel::indicators {

namespace {

TopKSet omega(const LabeledExample& ex, int k, Semantics semantics) {
  return semantics == Semantics::TopK ? top_k_set(ex.soft, k) : support_set(ex.soft);
}

void require_nonempty(const SoftDataset& ds) {
  if (ds.examples.empty()) throw ParameterError("indicators: empty dataset");
}

}  // namespace

Semantics semantics_from_string(const std::string& s) {
  if (s == "topk") return Semantics::TopK;
  if (s == "support") return Semantics::Support;
  throw ParameterError("unknown semantics '" + s + "' (expected topk or support)");
}

std::string to_string(Semantics s) { return s == Semantics::TopK ? "topk" : "support"; }

double estimate_delta(const SoftDataset& ds, int k, Semantics semantics) {
  require_nonempty(ds);
  long misses = 0;
  for (const auto& ex : ds.examples)
    if (!omega(ex, k, semantics).contains(ex.true_label)) ++misses;
  return static_cast<double>(misses) / static_cast<double>(ds.size());
}

GammaEstimate estimate_gamma(const SoftDataset& ds, int k, Semantics semantics) {
  require_nonempty(ds);
  const int c = ds.c;
  std::vector<long> cooccur(static_cast<size_t>(c), 0);
  std::vector<long> not_truth(static_cast<size_t>(c), 0);
  for (const auto& ex : ds.examples) {
    const TopKSet om = omega(ex, k, semantics);
    for (int i = 0; i < c; ++i) {
      if (i == ex.true_label) continue;
      ++not_truth[static_cast<size_t>(i)];
      if (om.contains(i)) ++cooccur[static_cast<size_t>(i)];
    }
  }
  GammaEstimate est;
  est.per_label.assign(static_cast<size_t>(c), std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < c; ++i) {
    if (not_truth[static_cast<size_t>(i)] == 0) {
      est.excluded_labels.push_back(i);
      continue;
    }
    est.per_label[static_cast<size_t>(i)] =
        static_cast<double>(cooccur[static_cast<size_t>(i)]) /
        static_cast<double>(not_truth[static_cast<size_t>(i)]);
    est.gamma = std::max(est.gamma, est.per_label[static_cast<size_t>(i)]);
  }
  return est;
}

ConsistencyResult consistency_check(double delta, double gamma) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw ParameterError("consistency_check: Delta must lie in [0,1)");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ParameterError("consistency_check: gamma must lie in [0,1]");
  ConsistencyResult res;
  res.margin = (1.0 - delta) - (gamma * (1.0 - delta) + delta);
  res.consistent = res.margin > 0.0;
  return res;
}

IndicatorReport analyze(const SoftDataset& ds, int k, Semantics semantics) {
  require_nonempty(ds);
  IndicatorReport rep;
  rep.c = ds.c;
  rep.n = ds.size();
  rep.k = k;
  rep.semantics = semantics;
  rep.delta = estimate_delta(ds, k, semantics);
  auto g = estimate_gamma(ds, k, semantics);
  rep.gamma = g.gamma;
  rep.per_label_cooccurrence = std::move(g.per_label);
  rep.excluded_labels = std::move(g.excluded_labels);
  rep.topk_accuracy = 1.0 - rep.delta;
  long top1_hits = 0;
  for (const auto& ex : ds.examples)
    if (top_k_set(ex.soft, 1).members[0] == ex.true_label) ++top1_hits;
  rep.top1_accuracy = static_cast<double>(top1_hits) / static_cast<double>(ds.size());
  if (rep.delta < 1.0) {
    auto cons = consistency_check(rep.delta, rep.gamma);
    rep.consistent = cons.consistent;
    rep.consistency_margin = cons.margin;
  } else {
    rep.consistent = false;
    rep.consistency_margin = -1.0;
  }
  if (rep.delta + rep.gamma < 1.0 && rep.delta < 1.0)
    rep.theta = bounds::theta(rep.delta, rep.gamma);
  return rep;
}

std::string IndicatorReport::to_json() const {
  nlohmann::json j{{"c", c},
                   {"n", n},
                   {"k", k},
                   {"semantics", indicators::to_string(semantics)},
                   {"delta", delta},
                   {"gamma", gamma},
                   {"top1_accuracy", top1_accuracy},
                   {"topk_accuracy", topk_accuracy},
                   {"consistency_margin", consistency_margin},
                   {"consistent", consistent},
                   {"theta_defined", theta.has_value()},
                   {"excluded_labels", excluded_labels}};
  j["theta"] = theta.has_value() ? nlohmann::json(*theta) : nlohmann::json(nullptr);
  nlohmann::json per = nlohmann::json::array();
  for (double v : per_label_cooccurrence)
    per.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
  j["per_label_cooccurrence"] = per;
  return j.dump(2);
}

std::string IndicatorReport::to_csv() const {
  auto num = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  std::string row = num(static_cast<double>(k)) + "," + num(delta) + "," + num(gamma) + "," +
                    num(top1_accuracy) + "," + num(topk_accuracy) + "," +
                    num(consistency_margin) + ",";
  if (theta) row += num(*theta);
  return "k,delta,gamma,top1_acc,topk_acc,margin,theta\n" + row + "\n";
}

}  // namespace softlabel::indicators
