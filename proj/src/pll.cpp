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

#include "softlabel/pll.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "softlabel/errors.hpp"
#include "softlabel/indicators.hpp"

namespace softlabel::pll {

using nlohmann::json;

void PLLSpec::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("pll: eta must lie in [0,1]");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ParameterError("pll: mu must lie in [0,1]");
  if (c < 2) throw ParameterError("pll: c must be >= 2");
  if (eta == 0.0 && mu == 1.0)
    throw ParameterError("pll: degenerate spec (eta = 0, mu = 1): every draw is empty");
}

std::vector<CandidateExample> generate_candidates(const std::vector<int>& true_labels,
                                                  const PLLSpec& spec, SplitRng rng) {
  spec.validate();
  std::vector<CandidateExample> out;
  out.reserve(true_labels.size());
  for (size_t idx = 0; idx < true_labels.size(); ++idx) {
    const int y = true_labels[idx];
    if (y < 0 || y >= spec.c) throw ParameterError("generate_candidates: label out of range");
    SplitRng ex_rng = rng.substream(idx);
    CandidateExample ex;
    ex.id = "e" + std::to_string(idx);
    ex.true_label = y;
    const bool keep_truth = ex_rng.bernoulli(1.0 - spec.mu);
    for (;;) {
      ex.candidates.clear();
      for (int i = 0; i < spec.c; ++i) {
        if (i == y) {
          if (keep_truth) ex.candidates.push_back(i);
        } else if (ex_rng.bernoulli(spec.eta)) {
          ex.candidates.push_back(i);
        }
      }
      if (!ex.candidates.empty()) break;
      if (spec.eta == 0.0) {
        // Conditioning on a nonempty set as eta -> 0+ leaves exactly one
        // uniform wrong label.
        int wrong = static_cast<int>(ex_rng.uniform_below(static_cast<uint64_t>(spec.c - 1)));
        if (wrong >= y) ++wrong;
        ex.candidates.push_back(wrong);
        break;
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

LabeledExample candidates_to_soft(const CandidateExample& ex, int c) {
  if (ex.candidates.empty()) throw ParameterError("candidates_to_soft: empty candidate set");
  LabeledExample out;
  out.id = ex.id;
  out.true_label = ex.true_label;
  out.soft.values.assign(static_cast<size_t>(c), 0.0);
  const double mass = 1.0 / static_cast<double>(ex.candidates.size());
  for (int i : ex.candidates) {
    if (i < 0 || i >= c) throw ParameterError("candidates_to_soft: candidate out of range");
    out.soft.values[static_cast<size_t>(i)] = mass;
  }
  return out;
}

SoftDataset candidates_to_dataset(const std::vector<CandidateExample>& exs, int c) {
  SoftDataset ds;
  ds.c = c;
  ds.examples.reserve(exs.size());
  for (const auto& ex : exs) ds.examples.push_back(candidates_to_soft(ex, c));
  return ds;
}

CandidateDataset load_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  CandidateDataset ds;
  std::string linebuf;
  long lineno = 0;
  int max_label = -1;
  bool saw_header = false;
  while (std::getline(in, linebuf)) {
    ++lineno;
    if (linebuf.empty()) continue;
    json row;
    try {
      row = json::parse(linebuf);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (lineno == 1 && row.contains("c") && !row.contains("id")) {
      ds.c = row.at("c").get<int>();
      saw_header = true;
      continue;
    }
    CandidateExample ex;
    try {
      ex.id = row.at("id").get<std::string>();
      ex.true_label = row.at("y").get<int>();
      ex.candidates = row.at("s").get<std::vector<int>>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad row: ") + e.what(), lineno);
    }
    if (ex.candidates.empty()) throw ParseError("row '" + ex.id + "': empty set", lineno);
    std::sort(ex.candidates.begin(), ex.candidates.end());
    max_label = std::max({max_label, ex.true_label, ex.candidates.back()});
    ds.examples.push_back(std::move(ex));
  }
  if (!saw_header) ds.c = max_label + 1;
  return ds;
}

void save_candidates(const CandidateDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << json{{"c", ds.c}}.dump() << '\n';
  for (const auto& ex : ds.examples)
    out << json{{"id", ex.id}, {"y", ex.true_label}, {"s", ex.candidates}}.dump() << '\n';
}

double predicted_gamma(const PLLSpec& spec) {
  spec.validate();
  if (spec.eta == 0.0) return spec.mu / static_cast<double>(spec.c - 1);
  // An empty draw happens with probability q = (1-eta)^(c-1) on the truth-
  // absent branch; conditioning on >= 1 inclusion lifts each wrong label's
  // rate from eta to eta / (1 - q).
  const double q = std::pow(1.0 - spec.eta, spec.c - 1);
  return spec.eta * (1.0 - spec.mu) + spec.mu * spec.eta / (1.0 - q);
}

Corollary1Report verify_corollary1(const PLLSpec& spec, long n, RandomSeed seed) {
  spec.validate();
  if (n < 1) throw ParameterError("verify_corollary1: n must be >= 1");
  SplitRng root(seed);
  SplitRng label_rng = root.substream(0);
  std::vector<int> labels(static_cast<size_t>(n));
  for (auto& y : labels) y = static_cast<int>(label_rng.uniform_below(static_cast<uint64_t>(spec.c)));
  const auto cands = generate_candidates(labels, spec, root.substream(1));
  const SoftDataset ds = candidates_to_dataset(cands, spec.c);

  Corollary1Report rep;
  rep.spec = spec;
  rep.n = n;
  rep.delta_hat = indicators::estimate_delta(ds, 1, indicators::Semantics::Support);
  const auto g = indicators::estimate_gamma(ds, 1, indicators::Semantics::Support);
  rep.gamma_hat = g.gamma;
  rep.per_label_cooccurrence = g.per_label;
  rep.delta_se = std::sqrt(rep.delta_hat * (1.0 - rep.delta_hat) / static_cast<double>(n));
  const double m = static_cast<double>(n) * (spec.c - 1.0) / spec.c;  // per-label denominator
  rep.gamma_se = std::sqrt(rep.gamma_hat * (1.0 - rep.gamma_hat) / m);
  rep.predicted_gamma = predicted_gamma(spec);
  rep.predicted_gamma_bias = rep.predicted_gamma - spec.eta;
  rep.degenerate_redraw_regime = rep.predicted_gamma_bias > 0.01 || (spec.eta == 0.0 && spec.mu > 0.0);
  rep.delta_deviation = std::abs(rep.delta_hat - spec.mu);
  rep.gamma_deviation = std::abs(rep.gamma_hat - spec.eta);
  return rep;
}

std::string Corollary1Report::to_json() const {
  json j{{"mu", spec.mu},
         {"eta", spec.eta},
         {"c", spec.c},
         {"n", n},
         {"delta_hat", delta_hat},
         {"gamma_hat", gamma_hat},
         {"delta_se", delta_se},
         {"gamma_se", gamma_se},
         {"delta_deviation", delta_deviation},
         {"gamma_deviation", gamma_deviation},
         {"predicted_gamma", predicted_gamma},
         {"predicted_gamma_bias", predicted_gamma_bias},
         {"degenerate_redraw_regime", degenerate_redraw_regime},
         {"per_label_cooccurrence", per_label_cooccurrence}};
  return j.dump(2);
}

}  // namespace softlabel::pll
