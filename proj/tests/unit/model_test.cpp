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


#include <gtest/gtest.h>

#include <thread>
#include <vector>

#include "dexchange/errors.hpp"
#include "dexchange/gf.hpp"
#include "dexchange/model.hpp"
#include "dexchange/testing/oracles.hpp"
#include "test_util.hpp"

namespace dexchange {
namespace {

using test::users;

TEST(UserSet, Basics) {
  const UserSet s = users({1, 3});
  EXPECT_EQ(s.size(), 2);
  EXPECT_TRUE(s.contains(0));
  EXPECT_FALSE(s.contains(1));
  EXPECT_EQ(s.to_string(), "{1,3}");
  EXPECT_EQ(UserSet::all(3).bits(), 7u);
  int count = 0;
  for_each_subset(UserSet::all(4), [&](UserSet) { ++count; });
  EXPECT_EQ(count, 16);
}

TEST(JointRank, Examples) {
  const CutSetOracle oracle(example1_instance());
  EXPECT_EQ(oracle.joint_rank(users({2})), 4);
  EXPECT_EQ(oracle.joint_rank(UserSet{}), 0);
  EXPECT_EQ(oracle.joint_rank(users({1, 2, 3})), 6);
  EXPECT_THROW(oracle.joint_rank(users({4})), std::invalid_argument);
}

TEST(JointRank, MemoMatchesEliminationAndIsMonotone) {
  for (const auto& inst : test::small_instances(30, 5, 6)) {
    const CutSetOracle oracle(inst);
    for_each_subset(inst.everyone(), [&](UserSet s) {
      const long r = oracle.joint_rank(s);
      EXPECT_EQ(r, static_cast<long>(gf::rank(inst.stacked(s))));
      EXPECT_EQ(oracle.joint_rank(s), r);
      for (int i = 0; i < inst.users(); ++i) EXPECT_LE(r, oracle.joint_rank(s.with(i)));
    });
    EXPECT_EQ(oracle.joint_rank(inst.everyone()), oracle.packets());
  }
}

TEST(JointRank, ConcurrentReadersAgree) {
  const auto inst = test::small_instances(10, 5, 6).back();
  const CutSetOracle oracle(inst);
  const testing::Reference ref(inst);
  std::vector<std::thread> threads;
  std::vector<int> mismatches(4, 0);
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for_each_subset(inst.everyone(), [&](UserSet s) {
        if (oracle.joint_rank(s) != ref.rank(s)) ++mismatches[t];
      });
    });
  }
  for (auto& th : threads) th.join();
  for (int m : mismatches) EXPECT_EQ(m, 0);
}

TEST(CutSetF, Examples) {
  const CutSetOracle oracle(example1_instance());
  EXPECT_EQ(oracle.cut_set_f(4, users({1})), 0);
  EXPECT_EQ(oracle.cut_set_f(5, users({2, 3})), 4);
  EXPECT_EQ(oracle.cut_set_f(5, UserSet{}), 0);
  EXPECT_EQ(oracle.cut_set_f(5, users({1, 2, 3})), 5);
  EXPECT_EQ(oracle.cut_set_f(5, users({1})), 1);
  EXPECT_EQ(oracle.cut_set_f(5, users({2})), 3);
  EXPECT_EQ(oracle.cut_set_f(5, users({3})), 3);
  EXPECT_EQ(oracle.cut_set_f(5, users({1, 2})), 4);
  EXPECT_EQ(oracle.cut_set_f(5, users({1, 3})), 5);
  EXPECT_EQ(oracle.cut_set_f(0, users({1})), -4);
}

TEST(Dilworth, Examples) {
  const auto inst = example1_instance();
  const testing::Reference ref(inst);
  EXPECT_EQ(testing::dilworth_value(ref, 4, users({1, 2, 3})), 3);
  EXPECT_EQ(testing::dilworth_value(ref, 5, users({1, 3})), 4);
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(testing::dilworth_value(ref, 5, users({i})), ref.f(5, users({i})));
}

TEST(Dilworth, PartitionCountsAreBellNumbers) {
  const long bell[] = {1, 1, 2, 5, 15, 52, 203};
  for (int n = 0; n <= 6; ++n) {
    long count = 0;
    testing::for_each_partition(UserSet::all(n), [&](const std::vector<UserSet>&) { ++count; });
    EXPECT_EQ(count, bell[n]);
  }
}

TEST(Dilworth, NeverExceedsF) {
  for (const auto& inst : test::small_instances(20, 4, 5)) {
    const testing::Reference ref(inst);
    for (long beta = 0; beta <= ref.packets() + 1; ++beta) {
      for_each_subset(inst.everyone(), [&](UserSet s) {
        EXPECT_LE(testing::dilworth_value(ref, beta, s), ref.f(beta, s));
      });
    }
  }
}

TEST(CutSetF, Submodularity) {
  for (const auto& inst : test::small_instances(40, 5, 6)) {
    const CutSetOracle oracle(inst);
    const UserSet all = inst.everyone();
    for (long beta = 0; beta <= oracle.packets() + 1; ++beta) {
      for_each_subset(all, [&](UserSet s) {
        for_each_subset(all, [&](UserSet t) {
          if ((s & t).empty() && beta < oracle.packets()) return;
          EXPECT_GE(oracle.cut_set_f(beta, s) + oracle.cut_set_f(beta, t),
                    oracle.cut_set_f(beta, s | t) + oracle.cut_set_f(beta, s & t))
              << "beta=" << beta << " S=" << s.to_string() << " T=" << t.to_string();
        });
      });
    }
  }
}

TEST(Region, Example1) {
  const CutSetOracle oracle(example1_instance());
  EXPECT_TRUE(in_cut_set_region(oracle, {1, 1, 3}));
  EXPECT_TRUE(in_cut_set_region(oracle, {1, 2, 2}));
  EXPECT_FALSE(in_cut_set_region(oracle, {0, 2, 3}));
  EXPECT_FALSE(in_cut_set_region(oracle, {0, 0, 0}));
}

TEST(Generate, Example1CoverageReproducesSetFunction) {
  const auto inst = raw_instance(257, 6, {{0, 1}, {1, 3, 4, 5}, {2, 3, 4, 5}});
  const CutSetOracle oracle(inst);
  const long expected[8] = {0, 1, 3, 4, 3, 5, 4, 5};
  for (std::uint32_t s = 0; s < 8; ++s) EXPECT_EQ(oracle.cut_set_f(5, UserSet(s)), expected[s]) << s;
}

TEST(Generate, CodedIsFullRankAndDeterministic) {
  GenerateOptions g;
  g.kind = InstanceKind::kCoded;
  g.users = 2;
  g.packets = 3;
  g.modulus = 257;
  g.seed = 42;
  const auto a = generate_instance(g);
  EXPECT_EQ(gf::rank(a.stacked(a.everyone())), 3u);
  const auto b = generate_instance(g);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(a.observation(i).to_rows(), b.observation(i).to_rows());
  g.seed = 43;
  const auto c = generate_instance(g);
  bool differ = false;
  for (int i = 0; i < 2; ++i) differ = differ || a.observation(i).to_rows() != c.observation(i).to_rows();
  EXPECT_TRUE(differ);
}

TEST(Generate, RawRowsAreDistinctUnitVectors) {
  GenerateOptions g;
  g.kind = InstanceKind::kRaw;
  g.users = 4;
  g.packets = 8;
  g.seed = 3;
  const auto inst = generate_instance(g);
  for (int i = 0; i < 4; ++i) {
    const auto rows = inst.observation(i).to_rows();
    for (const auto& r : rows) {
      int ones = 0;
      for (auto x : r) {
        EXPECT_TRUE(x == 0 || x == 1);
        ones += x == 1;
      }
      EXPECT_EQ(ones, 1);
    }
    EXPECT_EQ(gf::rank(inst.observation(i)), rows.size());
  }
}

TEST(Generate, Errors) {
  GenerateOptions g;
  g.kind = InstanceKind::kRaw;
  g.users = 2;
  g.packets = 4;
  g.coverage = {1, 1};
  EXPECT_THROW(generate_instance(g), InfeasibleInstance);
  g.coverage = {1, 5};
  EXPECT_THROW(generate_instance(g), InfeasibleInstance);
  g.coverage = {1};
  EXPECT_THROW(generate_instance(g), std::invalid_argument);
  g.coverage = {};
  g.users = 0;
  EXPECT_THROW(generate_instance(g), std::invalid_argument);
}

TEST(Instance, ValidatesShapesAndRank) {
  const gf::PrimeField f(5);
  EXPECT_THROW(ProblemInstance(f, 2, {gf::Matrix::from_rows(f, 2, {{1, 0}})}), InfeasibleInstance);
  EXPECT_THROW(ProblemInstance(f, 2, {gf::Matrix::from_rows(f, 3, {{1, 0, 0}})}), ShapeError);
  EXPECT_THROW(ProblemInstance(f, 0, {gf::Matrix(f, 0, 0)}), InfeasibleInstance);
  EXPECT_THROW(ProblemInstance(f, 2, {}), InfeasibleInstance);
  EXPECT_NO_THROW(ProblemInstance(f, 2, {gf::Matrix::identity(f, 2)}));
}

}  // namespace
}  // namespace dexchange
