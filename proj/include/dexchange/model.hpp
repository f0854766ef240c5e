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

// Data exchange instances and the cut-set set function.
//
// An instance holds m users; user i observes x_i = A_i w for a hidden packet
// vector w in GF(p)^N. For a sum-rate budget beta the cut-set constraints are
// captured by
//
//   f_beta(S) = 0                         if S is empty
//             = beta                      if S is every user
//             = beta - N + rank(A_S)      otherwise
//
// and a rate vector is feasible for beta iff it lies in the base polyhedron
// of f_beta.

#ifndef DEXCHANGE_MODEL_HPP_
#define DEXCHANGE_MODEL_HPP_

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "dexchange/errors.hpp"
#include "dexchange/gf.hpp"
#include "dexchange/rng.hpp"

namespace dexchange {

// Subset-enumerating algorithms make this the honest upper bound on users.
inline constexpr int kMaxUsers = 30;

// Set of users as a bitmask; bit i stands for user i (0-based).
class UserSet {
 public:
  constexpr UserSet() = default;
  constexpr explicit UserSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr UserSet all(int m) {
    return UserSet(m >= 32 ? ~0U : ((1U << m) - 1U));
  }
  static constexpr UserSet single(int i) { return UserSet(1U << i); }
  static UserSet of(std::initializer_list<int> users) {
    UserSet s;
    for (int u : users) s = s.with(u);
    return s;
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1U; }
  constexpr UserSet with(int i) const { return UserSet(bits_ | (1U << i)); }
  constexpr UserSet without(int i) const { return UserSet(bits_ & ~(1U << i)); }
  constexpr bool subset_of(UserSet o) const { return (bits_ & ~o.bits_) == 0; }

  constexpr UserSet operator|(UserSet o) const { return UserSet(bits_ | o.bits_); }
  constexpr UserSet operator&(UserSet o) const { return UserSet(bits_ & o.bits_); }
  constexpr UserSet operator-(UserSet o) const { return UserSet(bits_ & ~o.bits_); }
  friend constexpr bool operator==(UserSet, UserSet) = default;
  friend constexpr auto operator<=>(UserSet, UserSet) = default;

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  // "{1,3}" using 1-based user labels.
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int u : members()) {
      if (!first) s += ",";
      s += std::to_string(u + 1);
      first = false;
    }
    return s + "}";
  }

 private:
  std::uint32_t bits_ = 0;
};

// Calls fn(sub) for every subset of `mask`, in increasing bitmask order.
template <class Fn>
void for_each_subset(UserSet mask, Fn&& fn) {
  const std::uint32_t m = mask.bits();
  std::uint32_t s = 0;
  while (true) {
    fn(UserSet(s));
    if (s == m) break;
    s = (s - m) & m;
  }
}

// Per-user integer rates R_1..R_m, in symbols of GF(q).
using RateVector = std::vector<long>;

inline long rate_sum(const RateVector& r, UserSet s) {
  long total = 0;
  for (std::uint32_t b = s.bits(); b != 0; b &= b - 1) total += r[std::countr_zero(b)];
  return total;
}

class ProblemInstance {
 public:
  // Validates shapes and collective full rank.
  ProblemInstance(gf::PrimeField field, std::size_t packets, std::vector<gf::Matrix> observations)
      : field_(field), packets_(packets), observations_(std::move(observations)) {
    if (packets_ == 0) throw InfeasibleInstance("instance needs at least one packet");
    if (observations_.empty()) throw InfeasibleInstance("instance needs at least one user");
    if (observations_.size() > kMaxUsers) {
      throw std::invalid_argument("at most " + std::to_string(kMaxUsers) + " users are supported");
    }
    gf::RowBasis all(field_, packets_);
    for (std::size_t i = 0; i < observations_.size(); ++i) {
      const auto& a = observations_[i];
      if (a.cols() != packets_) {
        throw ShapeError("user " + std::to_string(i + 1) + " observation has " +
                         std::to_string(a.cols()) + " columns, expected " + std::to_string(packets_));
      }
      if (!(a.field() == field_)) throw ShapeError("observation field mismatch");
      all.insert_rows(a);
    }
    if (all.rank() != packets_) {
      throw InfeasibleInstance("users collectively hold rank " + std::to_string(all.rank()) +
                               " < N = " + std::to_string(packets_));
    }
  }

  const gf::PrimeField& field() const { return field_; }
  std::size_t packets() const { return packets_; }
  int users() const { return static_cast<int>(observations_.size()); }
  const gf::Matrix& observation(int i) const { return observations_.at(i); }
  const std::vector<gf::Matrix>& observations() const { return observations_; }
  UserSet everyone() const { return UserSet::all(users()); }

  // Vertical stack of A_i for i in s (0 x N when s is empty).
  gf::Matrix stacked(UserSet s) const {
    gf::Matrix out(field_, 0, packets_);
    for (int i : s.members()) out = out.vstack(observations_[i]);
    return out;
  }

 private:
  gf::PrimeField field_;
  std::size_t packets_;
  std::vector<gf::Matrix> observations_;
};

// Memoized rank(A_S). Safe to share between threads: small instances use a
// dense table of atomics, larger ones a lock-protected hash map. A racing
// duplicate computation just stores the same value twice.
class CutSetOracle {
 public:
  explicit CutSetOracle(std::shared_ptr<const ProblemInstance> instance)
      : instance_(std::move(instance)) {
    if (!instance_) throw std::invalid_argument("oracle needs an instance");
    if (instance_->users() <= kDenseLimit) {
      dense_ = std::make_unique<std::atomic<int>[]>(std::size_t{1} << instance_->users());
      for (std::size_t s = 0; s < (std::size_t{1} << instance_->users()); ++s) {
        dense_[s].store(-1, std::memory_order_relaxed);
      }
    }
  }
  explicit CutSetOracle(const ProblemInstance& instance)
      : CutSetOracle(std::make_shared<const ProblemInstance>(instance)) {}

  CutSetOracle(const CutSetOracle&) = delete;
  CutSetOracle& operator=(const CutSetOracle&) = delete;

  const ProblemInstance& instance() const { return *instance_; }
  int users() const { return instance_->users(); }
  long packets() const { return static_cast<long>(instance_->packets()); }
  UserSet everyone() const { return instance_->everyone(); }

  long joint_rank(UserSet s) const {
    if (!s.subset_of(everyone())) throw std::invalid_argument("subset references unknown users");
    if (s.empty()) return 0;
    if (dense_) {
      int v = dense_[s.bits()].load(std::memory_order_relaxed);
      if (v < 0) {
        v = compute(s);
        dense_[s.bits()].store(v, std::memory_order_relaxed);
      }
      return v;
    }
    {
      std::shared_lock lock(mutex_);
      auto it = sparse_.find(s.bits());
      if (it != sparse_.end()) return it->second;
    }
    const int v = compute(s);
    std::unique_lock lock(mutex_);
    sparse_.emplace(s.bits(), v);
    return v;
  }

  // f_beta(S); may be negative when beta < N.
  long cut_set_f(long beta, UserSet s) const {
    if (s.empty()) return 0;
    if (s == everyone()) return beta;
    return beta - packets() + joint_rank(s);
  }

  // Lower bound N - rank(A_{M\S}) that R(S) must meet.
  long cut_set_demand(UserSet s) const { return packets() - joint_rank(everyone() - s); }

 private:
  static constexpr int kDenseLimit = 20;

  int compute(UserSet s) const {
    gf::RowBasis basis(instance_->field(), instance_->packets());
    for (int i : s.members()) {
      basis.insert_rows(instance_->observation(i));
      if (basis.rank() == instance_->packets()) break;
    }
    return static_cast<int>(basis.rank());
  }

  std::shared_ptr<const ProblemInstance> instance_;
  std::unique_ptr<std::atomic<int>[]> dense_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint32_t, int> sparse_;
};

// True iff R(S) >= N - rank(A_{M\S}) for every proper subset S. Exhaustive.
inline bool in_cut_set_region(const CutSetOracle& oracle, const RateVector& r) {
  if (static_cast<int>(r.size()) != oracle.users()) return false;
  bool ok = true;
  const UserSet all = oracle.everyone();
  for_each_subset(all, [&](UserSet s) {
    if (ok && s != all && rate_sum(r, s) < oracle.cut_set_demand(s)) ok = false;
  });
  return ok;
}

enum class InstanceKind { kRaw, kCoded };

struct GenerateOptions {
  InstanceKind kind = InstanceKind::kCoded;
  int users = 3;
  std::size_t packets = 6;
  std::uint64_t modulus = 257;
  // Rows per user; empty means ceil(N/m) + 1 capped at N.
  std::vector<std::size_t> coverage;
  std::uint64_t seed = 0;
  int max_attempts = 1000;
};

inline std::vector<std::size_t> default_coverage(int users, std::size_t packets) {
  const std::size_t rows = std::min(packets, (packets + users - 1) / users + 1);
  return std::vector<std::size_t>(users, rows);
}

// Random instance that is collectively full rank. Raw instances give each
// user a random subset of distinct packets; coded instances draw every entry
// uniformly. Draws are resampled until the union has rank N.
inline ProblemInstance generate_instance(const GenerateOptions& opt) {
  if (opt.users < 1 || opt.users > kMaxUsers) throw std::invalid_argument("user count out of range");
  if (opt.packets < 1) throw std::invalid_argument("packet count must be positive");
  const gf::PrimeField field(opt.modulus);
  const auto coverage = opt.coverage.empty() ? default_coverage(opt.users, opt.packets) : opt.coverage;
  if (static_cast<int>(coverage.size()) != opt.users) {
    throw std::invalid_argument("coverage needs one row count per user");
  }
  const std::size_t total = std::accumulate(coverage.begin(), coverage.end(), std::size_t{0});
  if (total < opt.packets) {
    throw InfeasibleInstance("coverage provides " + std::to_string(total) + " rows for N = " +
                             std::to_string(opt.packets) + " packets");
  }
  if (opt.kind == InstanceKind::kRaw) {
    for (std::size_t rows : coverage) {
      if (rows > opt.packets) throw InfeasibleInstance("raw user cannot hold more than N distinct packets");
    }
  }
  CounterRng rng(RngSpec{opt.seed, 0});
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    std::vector<gf::Matrix> obs;
    for (int i = 0; i < opt.users; ++i) {
      gf::Matrix a(field, coverage[i], opt.packets);
      if (opt.kind == InstanceKind::kRaw) {
        std::vector<std::size_t> packets(opt.packets);
        std::iota(packets.begin(), packets.end(), 0);
        rng.shuffle(packets);
        std::vector<std::size_t> chosen(packets.begin(), packets.begin() + coverage[i]);
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t r = 0; r < chosen.size(); ++r) a.set(r, chosen[r], 1 % opt.modulus);
      } else {
        for (std::size_t r = 0; r < coverage[i]; ++r)
          for (std::size_t c = 0; c < opt.packets; ++c)
            a.set(r, c, static_cast<gf::Element>(rng.uniform(opt.modulus)));
      }
      obs.push_back(std::move(a));
    }
    gf::RowBasis basis(field, opt.packets);
    for (const auto& a : obs) basis.insert_rows(a);
    if (basis.rank() == opt.packets) return ProblemInstance(field, opt.packets, std::move(obs));
  }
  throw InfeasibleInstance("no collectively full-rank draw after " + std::to_string(opt.max_attempts) +
                           " attempts");
}

// Raw-packet instance from per-user packet index lists (0-based packets).
inline ProblemInstance raw_instance(std::uint64_t modulus, std::size_t packets,
                                    const std::vector<std::vector<std::size_t>>& holdings) {
  const gf::PrimeField field(modulus);
  std::vector<gf::Matrix> obs;
  for (const auto& held : holdings) {
    gf::Matrix a(field, held.size(), packets);
    for (std::size_t r = 0; r < held.size(); ++r) {
      if (held[r] >= packets) throw std::invalid_argument("packet index out of range");
      a.set(r, held[r], 1);
    }
    obs.push_back(std::move(a));
  }
  return ProblemInstance(field, packets, std::move(obs));
}

// Three users sharing six packets: {w1,w2}, {w2,w4,w5,w6}, {w3,w4,w5,w6}.
inline ProblemInstance example1_instance(std::uint64_t modulus = 257) {
  return raw_instance(modulus, 6, {{0, 1}, {1, 3, 4, 5}, {2, 3, 4, 5}});
}

}  // namespace dexchange

#endif  // DEXCHANGE_MODEL_HPP_
