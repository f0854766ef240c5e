// Copyright 2026 The dexchange Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEXCHANGE_RNG_HPP_
#define DEXCHANGE_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dexchange {

// Identifies a reproducible draw sequence. Distinct streams under one seed are
// statistically independent, which is how Monte-Carlo trials are split.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  static constexpr const char* kFamily = "splitmix64-counter";

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: the k-th output is a pure function of
// (seed, stream, k), so draws never depend on platform library details.
class CounterRng {
 public:
  explicit CounterRng(RngSpec spec)
      : spec_(spec), key_(splitmix64(spec.seed) ^ splitmix64(~spec.stream * 0xd1342543de82ef95ULL)) {}

  const RngSpec& spec() const { return spec_; }
  std::uint64_t position() const { return counter_; }

  std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, bound); rejection keeps it unbiased.
  std::uint64_t uniform(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform index permutation (Fisher-Yates).
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform(i)]);
    }
  }

 private:
  RngSpec spec_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dexchange

#endif  // DEXCHANGE_RNG_HPP_
