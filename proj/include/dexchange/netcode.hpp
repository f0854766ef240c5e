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

// Linear network codes for the data exchange.
//
// A transmission of user i is v = b A_i w for a coefficient row b; the
// packet-space row u = b A_i is what every other user learns. User i decodes
// once rank([A_i; U]) = N, where U stacks every broadcast u.

#ifndef DEXCHANGE_NETCODE_HPP_
#define DEXCHANGE_NETCODE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dexchange/cost.hpp"
#include "dexchange/errors.hpp"
#include "dexchange/gf.hpp"
#include "dexchange/model.hpp"
#include "dexchange/ratealloc.hpp"
#include "dexchange/rng.hpp"

namespace dexchange::netcode {

using gf::Element;

struct ScheduleEntry {
  long round = 0;  // 1-based
  int user = 0;    // 0-based
  std::vector<Element> coefficients;  // b, length l_user
  std::vector<Element> packet_row;    // u = b A_user, length N

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct TransmissionSchedule {
  std::uint64_t modulus = 0;
  std::size_t packets = 0;
  std::vector<ScheduleEntry> entries;
  RngSpec rng;

  friend bool operator==(const TransmissionSchedule&, const TransmissionSchedule&) = default;

  RateVector rates(int users) const {
    RateVector r(users, 0);
    for (const auto& e : entries) {
      if (e.user < 0 || e.user >= users) throw std::invalid_argument("schedule references unknown user");
      ++r[e.user];
    }
    return r;
  }

  gf::Matrix packet_rows() const {
    gf::Matrix u(gf::PrimeField(modulus), 0, packets);
    for (const auto& e : entries) u.append_row(e.packet_row);
    return u;
  }
};

// Supplies the coefficient row b for a transmission of `user` in `round`.
using CoefficientSource = std::function<std::vector<Element>(long round, int user, std::size_t length)>;

inline CoefficientSource uniform_coefficients(const gf::PrimeField& field, CounterRng& rng) {
  return [field, &rng](long, int, std::size_t length) {
    std::vector<Element> b(length);
    for (auto& x : b) x = static_cast<Element>(rng.uniform(field.order()));
    return b;
  };
}

// Throws FormatError unless the schedule matches the instance and every
// stored u equals b A_user.
inline void check_schedule(const ProblemInstance& inst, const TransmissionSchedule& s) {
  if (s.modulus != inst.field().order()) throw FormatError("schedule field does not match instance");
  if (s.packets != inst.packets()) throw FormatError("schedule packet count does not match instance");
  for (std::size_t k = 0; k < s.entries.size(); ++k) {
    const auto& e = s.entries[k];
    const std::string where = "schedule entry " + std::to_string(k + 1);
    if (e.user < 0 || e.user >= inst.users()) throw FormatError(where + " references an unknown user");
    const auto& a = inst.observation(e.user);
    if (e.coefficients.size() != a.rows()) throw FormatError(where + " has a coefficient row of wrong length");
    if (e.packet_row.size() != inst.packets()) throw FormatError(where + " has a packet row of wrong width");
    for (Element x : e.coefficients)
      if (!inst.field().contains(x)) throw FormatError(where + " has a non-canonical coefficient");
    if (a.left_apply(e.coefficients) != e.packet_row) {
      throw FormatError(where + " packet row differs from b * A_user");
    }
  }
}

struct RandomizedResult {
  bool feasible = false;
  long rounds_completed = 0;
  RateVector rates;
  TransmissionSchedule schedule;
  std::vector<UserSet> transmit_sets;
};

// Incremental allocation with on-the-fly random coding. In round j user i may
// transmit iff rank(A_i ∪ u(1..j-1)) > N - (beta - j + 1); among those under
// their cap the cheapest increment transmits a random combination. Ranks are
// maintained incrementally per user.
inline RandomizedResult randomized_alloc(const ProblemInstance& inst, long beta, const CostFunction& cost,
                                         const CapacityVector& caps, const CoefficientSource& draw) {
  const int m = inst.users();
  const long n = static_cast<long>(inst.packets());
  if (beta < 0) throw std::invalid_argument("sum-rate budget must be non-negative");
  cost.check_users(m);
  caps.check(m);
  std::vector<gf::RowBasis> known;
  for (int i = 0; i < m; ++i) {
    known.emplace_back(inst.field(), inst.packets());
    known.back().insert_rows(inst.observation(i));
  }
  RandomizedResult out;
  out.rates.assign(m, 0);
  out.schedule.modulus = inst.field().order();
  out.schedule.packets = inst.packets();
  for (long round = 1; round <= beta; ++round) {
    UserSet t;
    for (int i = 0; i < m; ++i) {
      if (out.rates[i] + 1 > caps.cap(i)) continue;
      if (static_cast<long>(known[i].rank()) > n - (beta - round + 1)) t = t.with(i);
    }
    out.transmit_sets.push_back(t);
    if (t.empty()) return out;
    const int sender = cheapest_increment(cost, out.rates, t);
    const auto& a = inst.observation(sender);
    auto b = draw(round, sender, a.rows());
    if (b.size() != a.rows()) throw std::invalid_argument("coefficient source returned a row of wrong length");
    auto u = a.left_apply(b);
    for (auto& basis : known) basis.insert(u);
    out.schedule.entries.push_back({round, sender, std::move(b), std::move(u)});
    ++out.rates[sender];
    out.rounds_completed = round;
  }
  out.feasible = true;
  return out;
}

inline RandomizedResult randomized_alloc(const ProblemInstance& inst, long beta, const CostFunction& cost,
                                         const CapacityVector& caps, RngSpec spec) {
  CounterRng rng(spec);
  auto result = randomized_alloc(inst, beta, cost, caps, uniform_coefficients(inst.field(), rng));
  result.schedule.rng = spec;
  return result;
}

struct DecodabilityReport {
  std::vector<bool> per_user;
  bool all = false;
};

// rank([A_i; U]) == N for each user, where U holds every broadcast row.
inline DecodabilityReport verify_decodable(const ProblemInstance& inst, const TransmissionSchedule& s) {
  if (s.packets != inst.packets()) throw ShapeError("schedule rows do not have width N");
  gf::RowBasis broadcast(inst.field(), inst.packets());
  for (const auto& e : s.entries) broadcast.insert(e.packet_row);
  DecodabilityReport rep;
  rep.all = true;
  for (int i = 0; i < inst.users(); ++i) {
    gf::RowBasis b = broadcast;
    b.insert_rows(inst.observation(i));
    const bool ok = b.rank() == inst.packets();
    rep.per_user.push_back(ok);
    rep.all = rep.all && ok;
  }
  return rep;
}

struct CodeResult {
  TransmissionSchedule schedule;
  int attempts = 0;
};

// Users whose rate vectors are checked exhaustively against the cut-set
// region before construction.
inline constexpr int kRegionCheckLimit = 20;

// Random code for a given rate vector: every user sends R_i uniform random
// combinations of its observations (users in index order); the draw is
// accepted once every user can decode. With q > m each attempt succeeds with
// probability at least (1 - m/q)^beta.
inline CodeResult construct_code(const ProblemInstance& inst, const RateVector& rates, RngSpec spec,
                                 int max_retries = 64) {
  const int m = inst.users();
  if (static_cast<int>(rates.size()) != m) throw std::invalid_argument("rate vector has wrong length");
  for (long r : rates)
    if (r < 0) throw InfeasibleRates("rates must be non-negative");
  if (max_retries < 1) throw std::invalid_argument("need at least one attempt");
  if (m <= kRegionCheckLimit) {
    CutSetOracle oracle(inst);
    if (!in_cut_set_region(oracle, rates)) {
      throw InfeasibleRates("rate vector violates a cut-set constraint");
    }
  }
  CounterRng rng(spec);
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    TransmissionSchedule s;
    s.modulus = inst.field().order();
    s.packets = inst.packets();
    s.rng = spec;
    long round = 0;
    for (int i = 0; i < m; ++i) {
      const auto& a = inst.observation(i);
      for (long k = 0; k < rates[i]; ++k) {
        std::vector<Element> b(a.rows());
        for (auto& x : b) x = static_cast<Element>(rng.uniform(inst.field().order()));
        auto u = a.left_apply(b);
        s.entries.push_back({++round, i, std::move(b), std::move(u)});
      }
    }
    if (verify_decodable(inst, s).all) return {std::move(s), attempt};
  }
  throw ConstructionFailed("no decodable code after " + std::to_string(max_retries) +
                               " attempts; consider a larger field",
                           max_retries);
}

// x_i = A_i w for every user.
inline std::vector<std::vector<Element>> observe(const ProblemInstance& inst, const std::vector<Element>& w) {
  std::vector<std::vector<Element>> x;
  for (const auto& a : inst.observations()) x.push_back(a.apply(w));
  return x;
}

// v_k = u_k . w for every schedule entry.
inline std::vector<Element> transmissions(const TransmissionSchedule& s, const std::vector<Element>& w) {
  return s.packet_rows().apply(w);
}

// Solves [A_i; U] w = [x_i; v].
inline std::vector<Element> decode(const ProblemInstance& inst, int user, const TransmissionSchedule& s,
                                   const std::vector<Element>& own, const std::vector<Element>& received) {
  if (user < 0 || user >= inst.users()) throw std::invalid_argument("unknown user");
  if (received.size() != s.entries.size()) throw ShapeError("one received symbol per schedule entry is required");
  const gf::Matrix system = inst.observation(user).vstack(s.packet_rows());
  std::vector<Element> rhs = own;
  rhs.insert(rhs.end(), received.begin(), received.end());
  if (gf::rank(system) != inst.packets()) {
    throw NotDecodable("user " + std::to_string(user + 1) + " holds rank " + std::to_string(gf::rank(system)) +
                       " < N");
  }
  try {
    return gf::solve_full_rank(system, rhs);
  } catch (const SingularSystem& e) {
    throw NotDecodable(e.what());
  }
}

// Per-budget RNG stream used by the randomized cost search.
inline RngSpec budget_stream(RngSpec spec, long beta) {
  return RngSpec{splitmix64(spec.seed ^ (0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(beta + 1))),
                 spec.stream};
}

struct RandomizedMinCost {
  bool feasible = false;
  long beta = 0;
  long beta_min = 0;
  double value = std::numeric_limits<double>::infinity();
  RandomizedResult allocation;
};

// Budget search driven entirely by the randomized allocator: a budget counts
// as feasible when all rounds complete and every user decodes. Bisection for
// the least such budget, then the slope search over [beta_min, min(N, c(M))].
// Random degeneracies can break convexity of the sampled h; the search then
// falls back to scanning the interval.
inline RandomizedMinCost randomized_min_cost(const ProblemInstance& inst, const CostFunction& cost,
                                             const CapacityVector& caps, RngSpec spec) {
  std::map<long, RandomizedResult> runs;
  auto run = [&](long b) -> const RandomizedResult& {
    auto it = runs.find(b);
    if (it == runs.end()) it = runs.emplace(b, randomized_alloc(inst, b, cost, caps, budget_stream(spec, b))).first;
    return it->second;
  };
  auto ok = [&](long b) {
    const auto& r = run(b);
    return r.feasible && verify_decodable(inst, r.schedule).all;
  };
  RandomizedMinCost out;
  const long hi = std::min(static_cast<long>(inst.packets()), caps.total());
  if (!ok(hi)) return out;
  long lo = -1, top = hi;
  while (top - lo > 1) {
    const long mid = lo + (top - lo + 1) / 2;
    if (ok(mid)) top = mid; else lo = mid;
  }
  out.beta_min = top;
  auto h = [&](long b) { return ok(b) ? cost.total(run(b).rates) : std::numeric_limits<double>::infinity(); };
  auto best = slope_search(top, hi, h);
  if (!best) {
    for (long b = top; b <= hi; ++b) {
      if (!std::isinf(h(b)) && (!best || !cost_le(h(*best), h(b)))) best = b;
    }
  }
  out.feasible = true;
  out.beta = *best;
  out.value = h(*best);
  out.allocation = run(*best);
  return out;
}

}  // namespace dexchange::netcode

#endif  // DEXCHANGE_NETCODE_HPP_
