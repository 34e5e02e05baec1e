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

#include <cmath>
#include <cstdint>
#include <random>

namespace softlabel {

/// splitmix64 finalizer; used to derive engine seeds from (seed, stream) keys.
inline constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Key of a deterministic random stream. Identical (seed, stream_id) keys
/// reproduce identical draws regardless of how work is partitioned.
struct RandomSeed {
  uint64_t seed = 0;
  uint64_t stream_id = 0;
};

/// Splittable random stream on top of mt19937_64 (whose output sequence is
/// fully specified by the standard). All distributions are implemented here
/// rather than with std:: distribution objects so the draws do not depend on
/// the standard library implementation.
class SplitRng {
 public:
  explicit SplitRng(RandomSeed key)
      : key_(key), eng_(mix64(mix64(key.seed) ^ key.stream_id)) {}
  SplitRng(uint64_t seed, uint64_t stream_id) : SplitRng(RandomSeed{seed, stream_id}) {}

  /// Independent child stream. Derived from the key, not the engine state,
  /// so substream(i) is the same whether or not draws happened in between.
  SplitRng substream(uint64_t child) const {
    return SplitRng(RandomSeed{key_.seed, mix64(key_.stream_id ^ mix64(child))});
  }

  RandomSeed key() const { return key_; }

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in {0, ..., n-1}; unbiased via rejection.
  uint64_t uniform_below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller (second value cached).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double gaussian(double sigma) { return sigma * gaussian(); }

  /// Laplace(0, b) by inverse CDF.
  double laplace(double b) {
    const double u = uniform01() - 0.5;
    return u < 0 ? b * std::log1p(2.0 * u) : -b * std::log1p(-2.0 * u);
  }

 private:
  RandomSeed key_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace softlabel
