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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 iff all
// pass.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "dexchange/io.hpp"
#include "dexchange/model.hpp"
#include "dexchange/ratealloc.hpp"
#include "dexchange/testing/suite.hpp"

namespace {

using dexchange::testing::CheckResult;

constexpr double kReplaySeconds = 1.0;
constexpr double kOracleSeconds = 60.0;
constexpr double kRlncSeconds = 30.0;
constexpr double kScalingSeconds = 120.0;
constexpr int kSuiteInstances = 50;
constexpr long kRlncTrials = 1000;
constexpr long kRoundTripSeeds = 100;

struct Line {
  std::string id;
  std::string title;
  bool passed;
  std::string detail;
  double seconds;
};

Line merge(std::string id, std::string title, const std::vector<CheckResult>& parts, double limit = 0.0) {
  Line line{std::move(id), std::move(title), true, "", 0.0};
  long checks = 0;
  for (const auto& p : parts) {
    line.seconds += p.seconds;
    checks += p.checks;
    if (!p.passed && line.passed) {
      line.passed = false;
      line.detail = p.name + ": " + p.detail;
      if (!p.counterexample.is_null()) line.detail += " " + p.counterexample.dump();
    }
  }
  if (line.passed) {
    line.detail = std::to_string(checks) + " checks";
    for (const auto& p : parts)
      if (!p.detail.empty()) line.detail += "; " + p.detail;
  }
  if (limit > 0 && line.seconds >= limit) {
    if (line.passed) line.detail = "took longer than the limit";
    line.passed = false;
  }
  return line;
}

}  // namespace

int main() {
  using namespace dexchange;
  namespace t = dexchange::testing;
  std::vector<Line> lines;

  lines.push_back(merge("AC1", "worked-example replay", t::worked_example_checks(), kReplaySeconds));

  t::SuiteOptions opt;
  opt.instances = kSuiteInstances;
  const auto cases = t::random_suite(opt);

  lines.push_back(merge("AC2", "solver equals exhaustive optimum", {t::check_oracle_equivalence(cases)},
                        kOracleSeconds));
  lines.push_back(merge("AC3", "subgradient equals SFM per coordinate", {t::check_subgradient_agreement(cases)}));
  lines.push_back(merge("AC4", "intersecting / full submodularity of f", {t::check_submodularity(cases)}));
  lines.push_back(merge("AC5", "convexity of h and beta* <= N", {t::check_h_convexity(cases)}));
  lines.push_back(merge("AC6", "restriction base polyhedron identity", {t::check_restriction_identity(cases)}));
  lines.push_back(merge("AC7", "random coding success rate", {t::check_rlnc({19, 257}, kRlncTrials, 0)},
                        kRlncSeconds));
  lines.push_back(merge("AC8", "code construction round trip", {t::check_code_round_trip(kRoundTripSeeds, 257)}));

  {
    t::Tally tally("scaling");
    GenerateOptions g;
    g.kind = InstanceKind::kCoded;
    g.users = 12;
    g.packets = 32;
    g.modulus = 257;
    g.seed = 7;
    const auto inst = std::make_shared<const ProblemInstance>(generate_instance(g));
    const CutSetOracle oracle(inst);
    std::vector<double> w;
    for (int i = 0; i < g.users; ++i) w.push_back(1.0 + i % 5);
    const auto mc = min_cost(oracle, CostFunction::linear(w));
    tally.expect(mc.feasible && mc.beta <= 32 && in_cut_set_region(oracle, mc.rates), "min-cost result invalid");
    tally.note("m=12 N=32 beta*=" + std::to_string(mc.beta));
    lines.push_back(merge("AC9", "scaling smoke test", {tally.finish()}, kScalingSeconds));
  }

  int failed = 0;
  for (const auto& l : lines) {
    std::printf("%s %s %s (%.2f s): %s\n", l.passed ? "PASS" : "FAIL", l.id.c_str(), l.title.c_str(), l.seconds,
                l.detail.c_str());
    if (!l.passed) ++failed;
  }
  std::printf("%zu criteria, %d failed\n", lines.size(), failed);
  return failed == 0 ? 0 : 1;
}
