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

// Pinned minimization  min_{S ⊆ free} f_beta(S ∪ {i}) - R(S).
//
// The objective is fully submodular on the free set, so any SFM routine
// applies. This one enumerates every subset: exact, deterministic and fine up
// to roughly 22 free users.

#ifndef DEXCHANGE_SFM_HPP_
#define DEXCHANGE_SFM_HPP_

#include <limits>
#include <stdexcept>

#include "dexchange/model.hpp"

namespace dexchange::sfm {

struct GroundSet {
  UserSet free;
  int pinned = 0;

  GroundSet(UserSet free_users, int pinned_user) : free(free_users), pinned(pinned_user) {
    if (free.contains(pinned)) throw std::invalid_argument("pinned user must not be free");
  }
};

struct PinnedMinimum {
  long value = 0;
  UserSet argmin;
};

// Ties go to the numerically smallest bitmask.
inline PinnedMinimum min_pinned(const CutSetOracle& oracle, long beta, const RateVector& rates,
                                const GroundSet& ground) {
  const int m = oracle.users();
  if (ground.pinned < 0 || ground.pinned >= m) throw std::invalid_argument("pinned user out of range");
  if (!ground.free.subset_of(oracle.everyone())) throw std::invalid_argument("free set out of range");
  if (static_cast<int>(rates.size()) != m) throw std::invalid_argument("rate vector has wrong length");
  PinnedMinimum best{std::numeric_limits<long>::max(), UserSet{}};
  for_each_subset(ground.free, [&](UserSet s) {
    const long v = oracle.cut_set_f(beta, s.with(ground.pinned)) - rate_sum(rates, s);
    if (v < best.value) best = {v, s};
  });
  return best;
}

}  // namespace dexchange::sfm

#endif  // DEXCHANGE_SFM_HPP_
