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

// Three users holding {w1,w2}, {w2,w4,w5,w6} and {w3,w4,w5,w6}: find the
// cheapest rates, build a code for them and decode at every user.

#include <iostream>
#include <vector>

#include "dexchange/cost.hpp"
#include "dexchange/model.hpp"
#include "dexchange/netcode.hpp"
#include "dexchange/ratealloc.hpp"
#include "dexchange/rng.hpp"

namespace {

void print_rates(const char* label, const dexchange::RateVector& r) {
  std::cout << label << " (";
  for (std::size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << r[i];
  std::cout << ")\n";
}

}  // namespace

int main() {
  using namespace dexchange;
  const ProblemInstance inst = example1_instance(257);
  const CutSetOracle oracle(inst);

  std::cout << "minimum sum-rate: " << min_sum_rate(oracle) << '\n';

  const auto linear = min_cost(oracle, CostFunction::linear({1.0, 3.0, 2.0}));
  print_rates("weights (1,3,2):", linear.rates);
  std::cout << "  cost " << linear.value << " at budget " << linear.beta << '\n';

  const auto fair = convex_alloc(oracle, 5, CostFunction::fair(inst.users()));
  print_rates("fair split of 5:", fair.rates);
  for (std::size_t j = 0; j < fair.transmit_sets.size(); ++j) {
    std::cout << "  round " << j + 1 << " candidates " << fair.transmit_sets[j].to_string() << '\n';
  }

  const auto code = netcode::construct_code(inst, linear.rates, RngSpec{1, 0});
  std::cout << "code found after " << code.attempts << " attempt(s)\n";

  CounterRng rng(RngSpec{2, 0});
  std::vector<gf::Element> w(inst.packets());
  for (auto& x : w) x = static_cast<gf::Element>(rng.uniform(inst.field().order()));
  const auto own = netcode::observe(inst, w);
  const auto sent = netcode::transmissions(code.schedule, w);
  for (int u = 0; u < inst.users(); ++u) {
    const bool ok = netcode::decode(inst, u, code.schedule, own[u], sent) == w;
    std::cout << "user " << u + 1 << (ok ? " recovered all packets" : " failed") << '\n';
  }
  return 0;
}
