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
#include <cstdio>

#include "softlabel/errors.hpp"
#include "softlabel/indicators.hpp"
#include "softlabel/pll.hpp"

using namespace softlabel;
using pll::PLLSpec;

namespace {

std::vector<int> cycled_labels(int c, long n) {
  std::vector<int> y(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) y[static_cast<size_t>(i)] = static_cast<int>(i % c);
  return y;
}

}  // namespace

TEST_CASE("degenerate extremes of the generator") {
  const auto labels = cycled_labels(5, 50);
  // mu = 0, eta = 0: every set is exactly {y}.
  for (const auto& ex : pll::generate_candidates(labels, {0.0, 0.0, 5}, SplitRng(1, 0)))
    CHECK(ex.candidates == std::vector<int>{ex.true_label});
  // mu = 0, eta = 1: every set is all labels.
  for (const auto& ex : pll::generate_candidates(labels, {1.0, 0.0, 5}, SplitRng(2, 0)))
    CHECK(ex.candidates == std::vector<int>{0, 1, 2, 3, 4});
  // eta = 0, mu = 1 cannot produce a nonempty set.
  CHECK_THROWS_AS(pll::generate_candidates(labels, {0.0, 1.0, 5}, SplitRng(3, 0)),
                  ParameterError);
}

TEST_CASE("eta = 0 with mu > 0 degenerates to a single uniform wrong label") {
  const auto labels = cycled_labels(6, 20000);
  const auto cands = pll::generate_candidates(labels, {0.0, 0.5, 6}, SplitRng(4, 0));
  long dropped = 0;
  for (const auto& ex : cands) {
    REQUIRE(ex.candidates.size() == 1);
    if (ex.candidates[0] != ex.true_label) ++dropped;
  }
  CHECK(static_cast<double>(dropped) / cands.size() == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("inclusion rates match the spec within 3 binomial SE") {
  const long n = 100000;
  const int c = 10;
  const PLLSpec spec{0.5, 0.3, c};
  const auto cands = pll::generate_candidates(cycled_labels(c, n), spec, SplitRng(5, 0));
  long truth_absent = 0;
  std::vector<long> wrong_in(static_cast<size_t>(c), 0), wrong_possible(static_cast<size_t>(c), 0);
  for (const auto& ex : cands) {
    bool has_truth = false;
    for (int l : ex.candidates) has_truth = has_truth || l == ex.true_label;
    if (!has_truth) ++truth_absent;
    for (int i = 0; i < c; ++i) {
      if (i == ex.true_label) continue;
      ++wrong_possible[static_cast<size_t>(i)];
      for (int l : ex.candidates)
        if (l == i) ++wrong_in[static_cast<size_t>(i)];
    }
  }
  const double mu_hat = static_cast<double>(truth_absent) / n;
  CHECK(std::abs(mu_hat - spec.mu) <= 3 * std::sqrt(0.3 * 0.7 / n));
  for (int i = 0; i < c; ++i) {
    const double rate = static_cast<double>(wrong_in[static_cast<size_t>(i)]) /
                        static_cast<double>(wrong_possible[static_cast<size_t>(i)]);
    const double se = std::sqrt(0.5 * 0.5 / static_cast<double>(wrong_possible[static_cast<size_t>(i)]));
    // eta = 0.5, c = 10: the redraw correction is O(eta * (1-eta)^9), negligible.
    CHECK(std::abs(rate - spec.eta) <= 3 * se + 1e-3);
  }
}

TEST_CASE("wrong-label inclusion exchangeability (chi-square sanity)") {
  const int c = 10;
  const long n = 20000;
  const auto cands = pll::generate_candidates(cycled_labels(c, n), {0.5, 0.3, c}, SplitRng(6, 0));
  std::vector<long> wrong_in(static_cast<size_t>(c), 0);
  long total = 0;
  for (const auto& ex : cands)
    for (int l : ex.candidates)
      if (l != ex.true_label) {
        ++wrong_in[static_cast<size_t>(l)];
        ++total;
      }
  const double expected = static_cast<double>(total) / c;
  double chi2 = 0;
  for (long o : wrong_in) chi2 += (o - expected) * (o - expected) / expected;
  // Very loose: far below this only if labels are systematically unbalanced.
  CHECK(chi2 < 50.0);
}

TEST_CASE("candidate/soft conversion and support inversion") {
  CHECK(pll::candidates_to_soft({"a", 2, {2}}, 4).soft == SoftLabel::one_hot(2, 4));
  const auto half = pll::candidates_to_soft({"b", 1, {1, 3}}, 4);
  CHECK(half.soft.values == std::vector<double>{0.0, 0.5, 0.0, 0.5});
  const auto all = pll::candidates_to_soft({"c", 0, {0, 1, 2, 3, 4}}, 5);
  CHECK(all.soft == SoftLabel::uniform(5));

  SplitRng rng(7, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const int c = 3 + static_cast<int>(rng.uniform_below(8));
    std::vector<int> cand;
    for (int i = 0; i < c; ++i)
      if (rng.bernoulli(0.4)) cand.push_back(i);
    if (cand.empty()) cand.push_back(static_cast<int>(rng.uniform_below(static_cast<uint64_t>(c))));
    const auto ex = pll::candidates_to_soft({"r", cand[0], cand}, c);
    CHECK(support_set(ex.soft).members == cand);
  }
}

TEST_CASE("mu = 0 gives exactly zero empirical delta") {
  for (long n : {10L, 1000L}) {
    const auto cands =
        pll::generate_candidates(cycled_labels(7, n), {0.2, 0.0, 7}, SplitRng(8, 0));
    const auto ds = pll::candidates_to_dataset(cands, 7);
    CHECK(indicators::estimate_delta(ds, 1, indicators::Semantics::Support) == 0.0);
  }
}

TEST_CASE("verify_corollary1 recovers (mu, eta)") {
  const auto rep = pll::verify_corollary1({0.5, 0.3, 10}, 100000, {9, 0});
  CHECK(std::abs(rep.delta_hat - 0.3) <= 3 * rep.delta_se);
  CHECK(std::abs(rep.gamma_hat - 0.5) <= 3 * rep.gamma_se + 1e-3);
  CHECK_FALSE(rep.degenerate_redraw_regime);
  const auto js = rep.to_json();
  CHECK(js.find("\"delta_hat\"") != std::string::npos);
}

TEST_CASE("redraw regime is flagged, not hidden") {
  // mu = 0.5, eta = 0.1, c = 10: the nonemptiness redraw lifts gamma by
  // ~0.03, well past the tolerance; the report must carry the flag.
  const auto rep = pll::verify_corollary1({0.1, 0.5, 10}, 50000, {10, 0});
  CHECK(rep.degenerate_redraw_regime);
  CHECK(rep.predicted_gamma_bias > 0.01);
  // And the measured deviation is explained by the predicted bias.
  CHECK(std::abs(rep.gamma_hat - rep.predicted_gamma) <= 3 * rep.gamma_se + 1e-3);

  // The eta = 0 limit is flagged too.
  const auto zero = pll::verify_corollary1({0.0, 0.5, 10}, 20000, {11, 0});
  CHECK(zero.degenerate_redraw_regime);
  CHECK(std::abs(zero.gamma_hat - zero.predicted_gamma) <= 3 * zero.gamma_se + 2e-3);
}

TEST_CASE("candidate JSONL round trip") {
  pll::CandidateDataset ds;
  ds.c = 6;
  const auto cands =
      pll::generate_candidates(cycled_labels(6, 100), {0.4, 0.2, 6}, SplitRng(12, 0));
  ds.examples = cands;
  const std::string path = "pll_roundtrip_test.jsonl";
  pll::save_candidates(ds, path);
  const auto back = pll::load_candidates(path);
  CHECK(back.c == ds.c);
  CHECK(back.examples == ds.examples);
  std::remove(path.c_str());
}
