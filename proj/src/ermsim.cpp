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

#include "softlabel/ermsim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "softlabel/errors.hpp"
#include "softlabel/pll.hpp"
#include "softlabel/teacher.hpp"

namespace softlabel::ermsim {

namespace {

// --- N-shattering via the class's traces on a subset ------------------------
//
// Traces on an m-subset are encoded base-c: key = sum label_p * c^p. The
// subset is N-shattered iff there are per-position label pairs (f1_p, f2_p),
// f1_p != f2_p, whose full combinatorial cube lies inside the trace set.
// The search strips one position per level: group by the lowest digit and
// recurse on the intersection of two groups' remainders.

struct CubeSearch {
  int c;
  std::vector<uint8_t> f1, f2;

  bool find(std::vector<uint32_t> traces, int m) {
    f1.assign(static_cast<size_t>(m), 0);
    f2.assign(static_cast<size_t>(m), 0);
    std::sort(traces.begin(), traces.end());
    traces.erase(std::unique(traces.begin(), traces.end()), traces.end());
    return descend(traces, m, 0);
  }

 private:
  bool descend(const std::vector<uint32_t>& traces, int m, int pos) {
    if (traces.empty()) return false;
    if (pos == m) return true;
    // Remainders per leading digit; input sorted => each group sorted.
    std::vector<std::vector<uint32_t>> groups(static_cast<size_t>(c));
    for (uint32_t key : traces)
      groups[key % static_cast<uint32_t>(c)].push_back(key / static_cast<uint32_t>(c));
    for (int u = 0; u < c; ++u) {
      if (groups[static_cast<size_t>(u)].empty()) continue;
      for (int v = u + 1; v < c; ++v) {
        if (groups[static_cast<size_t>(v)].empty()) continue;
        std::vector<uint32_t> common;
        std::set_intersection(groups[static_cast<size_t>(u)].begin(),
                              groups[static_cast<size_t>(u)].end(),
                              groups[static_cast<size_t>(v)].begin(),
                              groups[static_cast<size_t>(v)].end(), std::back_inserter(common));
        if (common.empty()) continue;
        if (descend(common, m, pos + 1)) {
          f1[static_cast<size_t>(pos)] = static_cast<uint8_t>(u);
          f2[static_cast<size_t>(pos)] = static_cast<uint8_t>(v);
          return true;
        }
      }
    }
    return false;
  }
};

bool next_combination(std::vector<int>& comb, int n) {
  const int m = static_cast<int>(comb.size());
  for (int i = m - 1; i >= 0; --i) {
    if (comb[static_cast<size_t>(i)] < n - m + i) {
      ++comb[static_cast<size_t>(i)];
      for (int j = i + 1; j < m; ++j)
        comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

std::string render(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void HypothesisClass::validate() const {
  if (c < 2 || c > 32) throw ParameterError("hypothesis class: requires 2 <= c <= 32");
  if (pool.empty() || pool_size() > kMaxPoolSize)
    throw ParameterError("hypothesis class: pool size must lie in [1," +
                         std::to_string(kMaxPoolSize) + "]");
  if (hypotheses.empty() || size() > kMaxClassSize)
    throw ParameterError("hypothesis class: size must lie in [1," +
                         std::to_string(kMaxClassSize) + "]");
  for (const auto& h : hypotheses) {
    if (static_cast<int>(h.size()) != pool_size())
      throw ParameterError("hypothesis class: hypothesis not total on the pool");
    for (uint8_t l : h)
      if (l >= c) throw ParameterError("hypothesis class: label out of range");
  }
}

HypothesisClass HypothesisClass::explicit_table(std::vector<double> pool, int c,
                                                std::vector<std::vector<uint8_t>> hypotheses) {
  HypothesisClass cls;
  cls.kind = Kind::ExplicitTable;
  cls.c = c;
  cls.pool = std::move(pool);
  cls.hypotheses = std::move(hypotheses);
  cls.validate();
  return cls;
}

HypothesisClass HypothesisClass::all_functions(std::vector<double> pool, int c) {
  const int p = static_cast<int>(pool.size());
  double total = 1;
  for (int i = 0; i < p; ++i) total *= c;
  if (total > static_cast<double>(kMaxClassSize))
    throw ParameterError("all_functions: c^pool exceeds the class-size guardrail");
  std::vector<std::vector<uint8_t>> hyps;
  hyps.reserve(static_cast<size_t>(total));
  std::vector<uint8_t> cur(static_cast<size_t>(p), 0);
  for (;;) {
    hyps.push_back(cur);
    int pos = p - 1;
    while (pos >= 0 && cur[static_cast<size_t>(pos)] == c - 1) {
      cur[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++cur[static_cast<size_t>(pos)];
  }
  return explicit_table(std::move(pool), c, std::move(hyps));
}

HypothesisClass HypothesisClass::constants(std::vector<double> pool, int c) {
  std::vector<std::vector<uint8_t>> hyps;
  for (int l = 0; l < c; ++l)
    hyps.emplace_back(pool.size(), static_cast<uint8_t>(l));
  return explicit_table(std::move(pool), c, std::move(hyps));
}

HypothesisClass HypothesisClass::intervals(std::vector<double> pool, int thresholds, int c) {
  if (!std::is_sorted(pool.begin(), pool.end()))
    throw ParameterError("intervals: pool must be ascending");
  const int p = static_cast<int>(pool.size());
  const int gaps = p - 1;
  if (thresholds < 0 || thresholds > gaps)
    throw ParameterError("intervals: thresholds must lie in [0, pool-1]");

  std::vector<std::vector<uint8_t>> hyps;
  std::unordered_set<std::string> seen;
  std::vector<int> cuts(static_cast<size_t>(thresholds));
  for (int i = 0; i < thresholds; ++i) cuts[static_cast<size_t>(i)] = i;
  std::vector<uint8_t> labels(static_cast<size_t>(thresholds) + 1, 0);
  for (;;) {
    // All segment labelings for this cut placement.
    std::fill(labels.begin(), labels.end(), 0);
    for (;;) {
      std::vector<uint8_t> h(static_cast<size_t>(p));
      int seg = 0;
      for (int i = 0; i < p; ++i) {
        while (seg < thresholds && i > cuts[static_cast<size_t>(seg)]) ++seg;
        h[static_cast<size_t>(i)] = labels[static_cast<size_t>(seg)];
      }
      if (seen.insert(std::string(h.begin(), h.end())).second) hyps.push_back(std::move(h));
      int pos = thresholds;
      while (pos >= 0 && labels[static_cast<size_t>(pos)] == c - 1) {
        labels[static_cast<size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++labels[static_cast<size_t>(pos)];
    }
    if (thresholds == 0 || !next_combination(cuts, gaps)) break;
  }
  HypothesisClass cls;
  cls.kind = Kind::IntervalMulticlass;
  cls.c = c;
  cls.pool = std::move(pool);
  cls.hypotheses = std::move(hyps);
  cls.validate();
  return cls;
}

NatarajanResult natarajan_dimension(const HypothesisClass& cls, int cap) {
  cls.validate();
  if (cap < 1 || cap > kMaxShatterCap)
    throw ParameterError("natarajan_dimension: cap must lie in [1," +
                         std::to_string(kMaxShatterCap) + "]");
  const int p = cls.pool_size();
  const int limit = std::min(cap, p);
  NatarajanResult res;

  std::vector<uint32_t> traces;
  traces.reserve(cls.hypotheses.size());
  bool stopped_early = false;
  for (int m = 1; m <= limit; ++m) {
    // c^m must fit the trace encoding.
    if (std::pow(static_cast<double>(cls.c), m) > 4.0e9) {
      stopped_early = true;
      break;
    }
    bool shattered = false;
    std::vector<int> subset(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) subset[static_cast<size_t>(i)] = i;
    do {
      traces.clear();
      for (const auto& h : cls.hypotheses) {
        uint32_t key = 0;
        for (int i = m - 1; i >= 0; --i)
          key = key * static_cast<uint32_t>(cls.c) + h[static_cast<size_t>(subset[static_cast<size_t>(i)])];
        traces.push_back(key);
      }
      CubeSearch search{cls.c, {}, {}};
      if (search.find(traces, m)) {
        shattered = true;
        res.dim = m;
        res.witness_points = subset;
        res.f1 = search.f1;
        res.f2 = search.f2;
        break;
      }
    } while (next_combination(subset, p));
    if (!shattered) return res;  // monotone: larger subsets cannot shatter
  }
  res.lower_bound_only = stopped_early || (res.dim == limit && limit < p);
  return res;
}

long erm(const HypothesisClass& cls, std::span<const PoolExample> train) {
  cls.validate();
  const int p = cls.pool_size();
  // Disagreement cost of assigning label l at pool point q.
  std::vector<long> cost(static_cast<size_t>(p) * cls.c, 0);
  for (const auto& ex : train) {
    if (ex.pool_index < 0 || ex.pool_index >= p)
      throw ParameterError("erm: training instance outside the pool");
    for (int l = 0; l < cls.c; ++l)
      if (!(ex.omega & (1u << l))) ++cost[static_cast<size_t>(ex.pool_index) * cls.c + l];
  }
  long best = 0;
  long best_cost = -1;
  for (long h = 0; h < cls.size(); ++h) {
    const auto& labels = cls.hypotheses[static_cast<size_t>(h)];
    long acc = 0;
    for (int q = 0; q < p; ++q) acc += cost[static_cast<size_t>(q) * cls.c + labels[static_cast<size_t>(q)]];
    if (best_cost < 0 || acc < best_cost) {
      best_cost = acc;
      best = h;
    }
  }
  return best;
}

std::vector<PoolExample> to_pool_examples(const SoftDataset& ds,
                                          std::span<const int> pool_indices, int k,
                                          indicators::Semantics semantics) {
  if (static_cast<long>(pool_indices.size()) != ds.size())
    throw ParameterError("to_pool_examples: index list and dataset sizes differ");
  std::vector<PoolExample> out;
  out.reserve(pool_indices.size());
  for (long i = 0; i < ds.size(); ++i) {
    const auto& ex = ds.examples[static_cast<size_t>(i)];
    const TopKSet om = semantics == indicators::Semantics::TopK ? top_k_set(ex.soft, k)
                                                                : support_set(ex.soft);
    out.push_back({pool_indices[static_cast<size_t>(i)], om.mask()});
  }
  return out;
}

double true_error(const HypothesisClass& cls, long h, long target,
                  std::span<const double> pool_weights) {
  if (h < 0 || h >= cls.size() || target < 0 || target >= cls.size())
    throw ParameterError("true_error: hypothesis index out of range");
  const int p = cls.pool_size();
  if (!pool_weights.empty() && static_cast<int>(pool_weights.size()) != p)
    throw ParameterError("true_error: weight vector size mismatch");
  double err = 0.0;
  for (int q = 0; q < p; ++q) {
    if (cls.hypotheses[static_cast<size_t>(h)][static_cast<size_t>(q)] !=
        cls.hypotheses[static_cast<size_t>(target)][static_cast<size_t>(q)])
      err += pool_weights.empty() ? 1.0 / p : pool_weights[static_cast<size_t>(q)];
  }
  return err;
}

std::vector<uint32_t> apply_mechanism(const LabelMech& mech, const std::vector<int>& labels,
                                      int c, SplitRng rng) {
  std::vector<uint32_t> masks(labels.size(), 0);
  if (const auto* m = std::get_if<CorruptorMech>(&mech)) {
    const SoftDataset ds =
        teacher::make_biased_soft_labels(labels, c, m->k, m->delta, m->gamma, rng);
    for (size_t i = 0; i < labels.size(); ++i)
      masks[i] = top_k_set(ds.examples[i].soft, m->k).mask();
  } else if (const auto* m = std::get_if<PllMech>(&mech)) {
    const auto cands = pll::generate_candidates(labels, {m->eta, m->mu, c}, rng);
    for (size_t i = 0; i < labels.size(); ++i) {
      uint32_t bits = 0;
      for (int l : cands[i].candidates) bits |= (1u << l);
      masks[i] = bits;
    }
  } else if (const auto* m = std::get_if<NoiseMech>(&mech)) {
    const SoftDataset ds = noise::make_noisy_dataset(labels, m->model, c, rng);
    for (size_t i = 0; i < labels.size(); ++i)
      masks[i] = top_k_set(ds.examples[i].soft, m->k).mask();
  } else {
    const auto& a = std::get<AdversarialMech>(mech);
    if (!(a.gamma >= a.delta && a.gamma <= 1.0 && a.delta >= 0.0 && a.delta < 1.0))
      throw ParameterError("adversarial mechanism: requires 0 <= delta <= gamma <= 1");
    if (a.decoy < 0 || a.decoy >= c) throw ParameterError("adversarial mechanism: bad decoy");
    const double ride_along = (a.gamma - a.delta) / (1.0 - a.delta);
    for (size_t i = 0; i < labels.size(); ++i) {
      SplitRng ex_rng = rng.substream(i);
      const int y = labels[i];
      uint32_t bits = 0;
      const bool keep_truth = ex_rng.bernoulli(1.0 - a.delta);
      if (y != a.decoy) {
        if (keep_truth) {
          bits |= (1u << y);
          if (ex_rng.bernoulli(ride_along)) bits |= (1u << a.decoy);
        } else {
          bits |= (1u << a.decoy);
        }
      } else {
        bits |= keep_truth ? (1u << y) : (1u << ((y + 1) % c));
      }
      masks[i] = bits;
    }
  }
  return masks;
}

std::pair<double, double> mechanism_indicators(const LabelMech& mech, int c) {
  if (const auto* m = std::get_if<CorruptorMech>(&mech)) {
    const double gamma =
        m->gamma ? *m->gamma : noise::gamma_additive_noise(m->delta, c, m->k);
    return {m->delta, gamma};
  }
  if (const auto* m = std::get_if<PllMech>(&mech))
    return {m->mu, pll::predicted_gamma({m->eta, m->mu, c})};
  if (const auto* m = std::get_if<NoiseMech>(&mech)) {
    const auto est = noise::delta_additive_noise(m->model, c, m->k,
                                                 noise::DeltaMethod::Quadrature, 0,
                                                 SplitRng(0, 0));
    return {est.delta, est.gamma};
  }
  const auto& a = std::get<AdversarialMech>(mech);
  return {a.delta, a.gamma};
}

ExperimentReport learnability_experiment(const HypothesisClass& cls,
                                         const ExperimentSpec& spec) {
  cls.validate();
  if (spec.target < 0 || spec.target >= cls.size())
    throw ParameterError("experiment: target hypothesis outside the class");
  if (spec.trials < 1) throw ParameterError("experiment: trials must be >= 1");
  if (!(spec.eps > 0.0 && spec.eps < 1.0))
    throw ParameterError("experiment: eps must lie in (0,1)");
  const int p = cls.pool_size();
  if (!spec.pool_weights.empty()) {
    if (static_cast<int>(spec.pool_weights.size()) != p)
      throw ParameterError("experiment: weight vector size mismatch");
    double sum = 0.0;
    for (double w : spec.pool_weights) sum += w;
    if (std::abs(sum - 1.0) > 1e-9)
      throw ParameterError("experiment: pool distribution must sum to 1");
  }

  ExperimentReport rep;
  std::tie(rep.mech_delta, rep.mech_gamma) = mechanism_indicators(spec.mech, cls.c);
  rep.theorem_region = rep.mech_delta + rep.mech_gamma < 1.0;
  rep.d_h = spec.d_h > 0 ? spec.d_h : natarajan_dimension(cls).dim;

  bounds::BoundParams bp;
  bp.delta_u = rep.mech_delta;
  bp.gamma_a = rep.mech_gamma;
  bp.eps = spec.eps;
  bp.conf = spec.conf;
  bp.d_h = std::max(1, rep.d_h);
  bp.labels = spec.labels_const > 0 ? spec.labels_const : cls.c;
  const bool bounds_ok =
      rep.mech_delta > 0.0 && rep.mech_delta < 1.0 && rep.mech_gamma > 0.0 &&
      rep.mech_gamma < 1.0 && rep.theorem_region;
  if (bounds_ok) {
    try {
      rep.n0 = bounds::sample_complexity(bp);
    } catch (const ParameterError&) {
      rep.n0.reset();  // vacuous regime: the experiment still runs
    }
  }

  // Cumulative weights for non-uniform pools.
  std::vector<double> cum;
  if (!spec.pool_weights.empty()) {
    cum.resize(spec.pool_weights.size());
    double acc = 0.0;
    for (size_t i = 0; i < cum.size(); ++i) {
      acc += spec.pool_weights[i];
      cum[i] = acc;
    }
    cum.back() = 1.0;
  }

  SplitRng root(spec.seed);
  const auto& target_labels = cls.hypotheses[static_cast<size_t>(spec.target)];
  for (size_t ni = 0; ni < spec.n_list.size(); ++ni) {
    const long n = spec.n_list[ni];
    if (n < 0) throw ParameterError("experiment: n must be >= 0");
    SplitRng n_rng = root.substream(ni);
    long failures = 0;
    double err_sum = 0.0;
    for (int t = 0; t < spec.trials; ++t) {
      SplitRng trial_rng = n_rng.substream(static_cast<uint64_t>(t));
      SplitRng draw_rng = trial_rng.substream(0);
      std::vector<int> points(static_cast<size_t>(n));
      std::vector<int> labels(static_cast<size_t>(n));
      for (long i = 0; i < n; ++i) {
        int q;
        if (cum.empty()) {
          q = static_cast<int>(draw_rng.uniform_below(static_cast<uint64_t>(p)));
        } else {
          const double u = draw_rng.uniform01();
          q = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        }
        points[static_cast<size_t>(i)] = q;
        labels[static_cast<size_t>(i)] = target_labels[static_cast<size_t>(q)];
      }
      const auto masks = apply_mechanism(spec.mech, labels, cls.c, trial_rng.substream(1));
      std::vector<PoolExample> train(static_cast<size_t>(n));
      for (long i = 0; i < n; ++i)
        train[static_cast<size_t>(i)] = {points[static_cast<size_t>(i)],
                                         masks[static_cast<size_t>(i)]};
      const long h = erm(cls, train);
      const double err = true_error(cls, h, spec.target, spec.pool_weights);
      err_sum += err;
      if (err >= spec.eps) ++failures;
    }
    ExperimentRow row;
    row.n = n;
    row.failure_rate = static_cast<double>(failures) / spec.trials;
    row.mean_true_error = err_sum / spec.trials;
    if (bounds_ok && n >= 1) {
      row.bound_statement_log =
          bounds::failure_prob_bound(n, bp, bounds::BoundVariant::Statement).log_bound;
      const auto der = bounds::failure_prob_bound(n, bp, bounds::BoundVariant::Derivation);
      row.bound_derivation_log = der.log_bound;
      row.bound_derivation_vacuous = der.vacuous;
    } else {
      row.bound_statement_log = std::numeric_limits<double>::quiet_NaN();
      row.bound_derivation_log = std::numeric_limits<double>::quiet_NaN();
    }
    rep.rows.push_back(row);
  }
  return rep;
}

std::string ExperimentReport::to_csv() const {
  std::string out = "n,failure_rate,n0,bound_statement,bound_derivation\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n) + "," + render(row.failure_rate) + ",";
    out += n0 ? render(n0->effective_n0) : std::string("n/a");
    out += ",";
    out += std::isnan(row.bound_statement_log) ? std::string("n/a")
                                               : render(row.bound_statement_log);
    out += ",";
    out += std::isnan(row.bound_derivation_log) || row.bound_derivation_vacuous
               ? std::string("n/a")
               : render(row.bound_derivation_log);
    out += "\n";
  }
  return out;
}

}  // namespace softlabel::ermsim
