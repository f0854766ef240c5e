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

// Deterministic rate allocation over the cut-set polyhedron.
//
// f_beta is only intersecting submodular, but its polyhedron coincides with
// that of its Dilworth truncation, which is fully submodular. Greedy
// algorithms therefore work as long as every coordinate step asks "how far can
// this coordinate grow while staying in P(f_beta)?". That question is
//
//   max R_i  =  min_{S ⊆ P} f_beta(S ∪ {i}) - R(S)
//
// for the set P of coordinates already fixed, and it is answered either by
// exhaustive SFM (default) or by a dual subgradient method.
//
// Feasibility of a budget beta is detected for free: the greedy sweep reaches
// sum beta iff the base polyhedron B(f_beta) is nonempty.

#ifndef DEXCHANGE_RATEALLOC_HPP_
#define DEXCHANGE_RATEALLOC_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dexchange/cost.hpp"
#include "dexchange/model.hpp"
#include "dexchange/sfm.hpp"

namespace dexchange {

enum class Backend { kSfm, kSubgradient };

// Constant-step dual subgradient parameters. The guarantee that rounding the
// best dual value recovers the exact coordinate needs
//   step < 1 / (2 N^2),  tolerance < 1/2,  iterations > m^2 / (step (1 - 2 N^2 step)).
struct SubgradientConfig {
  double step = 0.0;
  long iterations = 0;
  double tolerance = 0.49;

  static SubgradientConfig defaults(int users, long packets) {
    SubgradientConfig cfg;
    const double n2 = static_cast<double>(packets) * static_cast<double>(packets);
    cfg.step = 1.0 / (4.0 * n2);
    cfg.iterations = static_cast<long>(std::ceil(iteration_bound(users, packets, cfg.step))) + 1;
    return cfg;
  }

  static double iteration_bound(int users, long packets, double step) {
    const double n2 = static_cast<double>(packets) * static_cast<double>(packets);
    return static_cast<double>(users) * users / (step * (1.0 - 2.0 * n2 * step));
  }

  bool valid_for(int users, long packets) const {
    const double n2 = static_cast<double>(packets) * static_cast<double>(packets);
    return step > 0 && step < 1.0 / (2.0 * n2) && tolerance > 0 && tolerance < 0.5 &&
           static_cast<double>(iterations) > iteration_bound(users, packets, step);
  }
};

struct SolverOptions {
  Backend backend = Backend::kSfm;
  // Defaults derived from (m, N) when unset.
  std::optional<SubgradientConfig> subgradient;
};

// Output of the greedy allocators. On failure `rates` holds whatever the
// sweep produced and `achieved` the reached progress: the sum g_beta(M) (or
// its capped analogue) for Edmonds, the number of completed rounds for the
// incremental allocators.
struct AllocationResult {
  bool feasible = false;
  RateVector rates;
  long achieved = 0;
  // Incremental allocators only: the candidate set of every round.
  std::vector<UserSet> transmit_sets;
};

// ---------------------------------------------------------------------------
// Dual subgradient coordinate step.

// A maximizer of  R_i + sum_{k in prefix} lambda_k R_k  over
// { R : R(S ∪ {i}) <= f_beta(S ∪ {i}) for all S ⊆ prefix }.
// Greedy in non-increasing weight order: user i carries weight 1 and goes
// first unless some multiplier exceeds 1, in which case it is saturated last
// and gets 0. Equal multipliers are ordered by user index.
inline RateVector dual_maximizer(const CutSetOracle& oracle, long beta, int user, UserSet prefix,
                                 const std::vector<double>& lambda) {
  const int m = oracle.users();
  if (static_cast<int>(lambda.size()) != m) throw std::invalid_argument("multiplier vector has wrong length");
  if (prefix.contains(user)) throw std::invalid_argument("pinned user cannot be in the prefix");
  std::vector<int> order = prefix.members();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lambda[a] > lambda[b]; });

  RateVector r(m, 0);
  const bool own_first = order.empty() || lambda[order.front()] <= 1.0;
  r[user] = own_first ? oracle.cut_set_f(beta, UserSet::single(user)) : 0;
  long assigned = r[user];
  UserSet seen = UserSet::single(user);
  for (int k : order) {
    seen = seen.with(k);
    r[k] = oracle.cut_set_f(beta, seen) - assigned;
    assigned += r[k];
  }
  return r;
}

// delta(lambda) = max_R { R_i + sum lambda_k R_k } - sum lambda_k R*_k.
inline double dual_value(int user, UserSet prefix, const RateVector& maximizer, const RateVector& fixed,
                         const std::vector<double>& lambda) {
  double v = static_cast<double>(maximizer[user]);
  for (int k : prefix.members()) v += lambda[k] * static_cast<double>(maximizer[k] - fixed[k]);
  return v;
}

// max R_i with R_k >= fixed[k] on the prefix, via projected subgradient
// descent on the dual from lambda = 0, keeping the best dual value seen and
// rounding it. Equals min_{S ⊆ prefix} f_beta(S ∪ {i}) - fixed(S).
inline long subgrad_coordinate(const CutSetOracle& oracle, long beta, const RateVector& fixed, UserSet prefix,
                               int user, const SubgradientConfig& cfg) {
  const int m = oracle.users();
  if (static_cast<int>(fixed.size()) != m) throw std::invalid_argument("rate vector has wrong length");
  if (!cfg.valid_for(m, oracle.packets())) {
    throw std::invalid_argument("subgradient step/iteration count violate the convergence bounds");
  }
  std::vector<double> lambda(m, 0.0);
  const auto members = prefix.members();
  double best = std::numeric_limits<double>::infinity();
  for (long j = 0; j <= cfg.iterations; ++j) {
    const RateVector r = dual_maximizer(oracle, beta, user, prefix, lambda);
    best = std::min(best, dual_value(user, prefix, r, fixed, lambda));
    if (j == cfg.iterations) break;
    bool zero_subgradient = true;
    for (int k : members) {
      const long g = r[k] - fixed[k];
      if (g != 0) zero_subgradient = false;
      lambda[k] = std::max(0.0, lambda[k] - cfg.step * static_cast<double>(g));
    }
    // 0 in the subdifferential: lambda already minimizes delta.
    if (zero_subgradient) break;
  }
  return std::lround(best);
}

// ---------------------------------------------------------------------------
// Coordinate maximization shared by all greedy sweeps.

inline long coordinate_max(const CutSetOracle& oracle, long beta, const RateVector& rates, UserSet prefix,
                           int user, const SolverOptions& opts) {
  if (opts.backend == Backend::kSubgradient) {
    const auto cfg = opts.subgradient.value_or(SubgradientConfig::defaults(oracle.users(), oracle.packets()));
    return subgrad_coordinate(oracle, beta, rates, prefix, user, cfg);
  }
  return sfm::min_pinned(oracle, beta, rates, sfm::GroundSet(prefix, user)).value;
}

// ---------------------------------------------------------------------------
// Linear cost.

// Users sorted by non-decreasing weight; ties by index.
inline std::vector<int> weight_order(const std::vector<double>& weights) {
  std::vector<int> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return weights[a] < weights[b]; });
  return order;
}

// Greedy over P(f_beta) ∩ {R <= c}: each user in weight order takes the
// largest rate the polyhedron and its cap still allow.
inline AllocationResult modified_edmonds(const CutSetOracle& oracle, long beta, const std::vector<double>& weights,
                                         const CapacityVector& caps = {}, const SolverOptions& opts = {}) {
  const int m = oracle.users();
  if (beta < 0) throw std::invalid_argument("sum-rate budget must be non-negative");
  if (static_cast<int>(weights.size()) != m) throw std::invalid_argument("need one weight per user");
  for (double w : weights)
    if (!(w > 0)) throw std::invalid_argument("weights must be positive");
  caps.check(m);

  AllocationResult out;
  out.rates.assign(m, 0);
  UserSet prefix;
  for (int user : weight_order(weights)) {
    const long reach = coordinate_max(oracle, beta, out.rates, prefix, user, opts);
    out.rates[user] = std::min(caps.cap(user), reach);
    prefix = prefix.with(user);
  }
  out.achieved = std::accumulate(out.rates.begin(), out.rates.end(), 0L);
  out.feasible = out.achieved == beta;
  return out;
}

inline bool budget_feasible(const CutSetOracle& oracle, long beta, const CapacityVector& caps,
                            const SolverOptions& opts) {
  return modified_edmonds(oracle, beta, std::vector<double>(oracle.users(), 1.0), caps, opts).feasible;
}

// Least feasible budget, by bisection on [0, min(N, c(M))]. Returns nullopt
// when the caps rule out every budget up to N.
inline std::optional<long> min_sum_rate(const CutSetOracle& oracle, const CapacityVector& caps,
                                        const SolverOptions& opts = {}) {
  caps.check(oracle.users());
  long hi = std::min(oracle.packets(), caps.total());
  if (!budget_feasible(oracle, hi, caps, opts)) return std::nullopt;
  long lo = -1;  // known infeasible
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo + 1) / 2;
    if (budget_feasible(oracle, mid, caps, opts)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

inline long min_sum_rate(const CutSetOracle& oracle) { return *min_sum_rate(oracle, CapacityVector{}); }

// ---------------------------------------------------------------------------
// Convex separable cost.

// Users whose unit increment keeps R inside P(f_beta) and under their cap.
inline UserSet transmit_set(const CutSetOracle& oracle, long beta, const RateVector& rates,
                            const CapacityVector& caps, const SolverOptions& opts) {
  UserSet out;
  const UserSet all = oracle.everyone();
  for (int i = 0; i < oracle.users(); ++i) {
    if (rates[i] + 1 > caps.cap(i)) continue;
    const long reach = coordinate_max(oracle, beta, rates, all.without(i), i, opts);
    if (reach - rates[i] >= 1) out = out.with(i);
  }
  return out;
}

// Smallest d_i(R_i + 1) over the candidates; near-ties go to the lower index.
inline int cheapest_increment(const CostFunction& cost, const RateVector& rates, UserSet candidates) {
  int best = -1;
  double best_d = 0.0;
  for (int i : candidates.members()) {
    const double d = cost.derivative(i, rates[i] + 1);
    if (best < 0 || d < best_d - kDerivativeTieTolerance) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

// True iff R = 0 lies in P(f_beta), i.e. f_beta(S) >= 0 for every S. Every
// base vector is non-negative, so this is necessary for feasibility.
inline bool zero_in_polyhedron(const CutSetOracle& oracle, long beta, const SolverOptions& opts = {}) {
  const RateVector zero(oracle.users(), 0);
  for (int i = 0; i < oracle.users(); ++i) {
    if (coordinate_max(oracle, beta, zero, oracle.everyone().without(i), i, opts) < 0) return false;
  }
  return true;
}

// Starting from zero, beta rounds each add one symbol to the cheapest user
// that can still grow. An empty candidate set means B(f_beta) ∩ {R <= c} is
// empty; so does a starting point outside P(f_beta), reported with no
// rounds completed.
inline AllocationResult convex_alloc(const CutSetOracle& oracle, long beta, const CostFunction& cost,
                                     const CapacityVector& caps = {}, const SolverOptions& opts = {}) {
  const int m = oracle.users();
  if (beta < 0) throw std::invalid_argument("sum-rate budget must be non-negative");
  cost.check_users(m);
  caps.check(m);
  AllocationResult out;
  out.rates.assign(m, 0);
  if (!zero_in_polyhedron(oracle, beta, opts)) return out;
  for (long round = 1; round <= beta; ++round) {
    const UserSet t = transmit_set(oracle, beta, out.rates, caps, opts);
    out.transmit_sets.push_back(t);
    if (t.empty()) {
      out.achieved = round - 1;
      return out;
    }
    ++out.rates[cheapest_increment(cost, out.rates, t)];
  }
  out.achieved = beta;
  out.feasible = true;
  return out;
}

struct HValue {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  RateVector rates;
  long achieved = 0;
};

// h(beta): optimal cost at a fixed budget.
inline HValue eval_h(const CutSetOracle& oracle, long beta, const CostFunction& cost, const CapacityVector& caps = {},
                     const SolverOptions& opts = {}) {
  cost.check_users(oracle.users());
  const AllocationResult a = cost.kind() == CostKind::kLinear
                                 ? modified_edmonds(oracle, beta, cost.weights(), caps, opts)
                                 : convex_alloc(oracle, beta, cost, caps, opts);
  HValue h;
  h.feasible = a.feasible;
  h.rates = a.rates;
  h.achieved = a.achieved;
  if (a.feasible) h.value = cost.total(a.rates);
  return h;
}

// Relative tolerance for comparing h values built from floating costs.
inline bool cost_le(double a, double b) { return a <= b + 1e-9 * (1.0 + std::abs(b)); }
inline bool cost_eq(double a, double b) { return cost_le(a, b) && cost_le(b, a); }

// Slope-change bisection for the minimizer of a convex h on [lo, hi]; values
// outside the interval count as +inf. Among equal minima the smallest beta is
// returned. nullopt if no local minimum was located, which cannot happen for
// convex h.
template <class H>
std::optional<long> slope_search(long lo, long hi, H&& h_raw) {
  std::map<long, double> memo;
  const long lo0 = lo;
  auto h = [&](long b) {
    if (b < lo0 || b > hi) return std::numeric_limits<double>::infinity();
    auto it = memo.find(b);
    if (it != memo.end()) return it->second;
    const double v = h_raw(b);
    memo.emplace(b, v);
    return v;
  };
  const long hi0 = hi;
  long left = lo, right = hi0;
  while (left <= right) {
    const long b = left + (right - left + 1) / 2;
    const double hb = h(b), hm = h(b - 1), hp = h(b + 1);
    if (std::isinf(hb)) return std::nullopt;
    if (cost_le(hb, hm) && cost_le(hb, hp)) {
      long best = b;
      while (best - 1 >= lo0 && cost_eq(h(best - 1), h(best))) --best;
      return best;
    }
    if (cost_le(hp, hb) && cost_le(hb, hm)) {
      left = b + 1;
    } else {
      right = b - 1;
    }
  }
  return std::nullopt;
}

struct MinCostResult {
  bool feasible = false;
  long beta = 0;
  long beta_min = 0;
  double value = std::numeric_limits<double>::infinity();
  RateVector rates;
};

// Minimum of h over budgets. Feasible budgets form [beta_min, c(M)] and the
// minimizer never exceeds N, so the search runs over [beta_min, min(N, c(M))].
inline MinCostResult min_cost(const CutSetOracle& oracle, const CostFunction& cost, const CapacityVector& caps = {},
                              const SolverOptions& opts = {}) {
  cost.check_users(oracle.users());
  caps.check(oracle.users());
  MinCostResult out;
  const auto beta_min = min_sum_rate(oracle, caps, opts);
  if (!beta_min) return out;
  out.beta_min = *beta_min;
  const long hi = std::min(oracle.packets(), caps.total());
  std::map<long, HValue> evaluated;
  auto h = [&](long b) {
    auto [it, inserted] = evaluated.try_emplace(b);
    if (inserted) it->second = eval_h(oracle, b, cost, caps, opts);
    return it->second.feasible ? it->second.value : std::numeric_limits<double>::infinity();
  };
  const auto best = slope_search(*beta_min, hi, h);
  if (!best) throw std::logic_error("h is not convex over the feasible budgets");
  const HValue& hv = evaluated.at(*best);
  out.feasible = true;
  out.beta = *best;
  out.value = hv.value;
  out.rates = hv.rates;
  return out;
}

}  // namespace dexchange

#endif  // DEXCHANGE_RATEALLOC_HPP_
