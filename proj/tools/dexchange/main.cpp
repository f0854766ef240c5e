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

// dexchange command-line tool. Reports go to stdout as JSON, a one-line
// summary to stderr.
//
// Exit codes: 0 ok, 1 usage or I/O, 2 infeasible, 3 code construction failed,
// 4 not decodable, 5 property violated.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dexchange/cost.hpp"
#include "dexchange/errors.hpp"
#include "dexchange/io.hpp"
#include "dexchange/model.hpp"
#include "dexchange/netcode.hpp"
#include "dexchange/ratealloc.hpp"
#include "dexchange/rng.hpp"
#include "dexchange/testing/suite.hpp"

namespace {

using namespace dexchange;
using nlohmann::json;

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kInfeasible = 2,
  kConstruction = 3,
  kDecode = 4,
  kProperty = 5,
};

// Thrown by command handlers to leave with a specific exit code after the
// report has been printed.
struct ExitWith {
  int code;
  std::string message;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const json& report) { std::cout << report.dump(2) << '\n'; }

json sets_json(const std::vector<UserSet>& sets) {
  json out = json::array();
  for (UserSet s : sets) out.push_back(s.to_string());
  return out;
}

json decodability_json(const netcode::DecodabilityReport& rep) {
  json users = json::array();
  for (std::size_t i = 0; i < rep.per_user.size(); ++i) {
    users.push_back({{"user", i + 1}, {"decodable", static_cast<bool>(rep.per_user[i])}});
  }
  return {{"users", users}, {"all", rep.all}};
}

std::shared_ptr<const ProblemInstance> load_instance(const std::string& path) {
  return std::make_shared<const ProblemInstance>(io::instance_from_json(io::read_json_file(path)));
}

netcode::TransmissionSchedule load_schedule(const ProblemInstance& inst, const std::string& path) {
  auto s = io::schedule_from_json(io::read_json_file(path));
  netcode::check_schedule(inst, s);
  return s;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind = "coded";
  std::string preset;
  int users = 3;
  std::size_t packets = 6;
  std::uint64_t modulus = 257;
  std::vector<std::size_t> rows;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  std::optional<ProblemInstance> inst;
  if (!a.preset.empty()) {
    if (a.preset != "example1") throw ExitWith{kUsage, "unknown preset " + a.preset};
    inst = example1_instance(a.modulus);
  } else {
    GenerateOptions g;
    g.kind = a.kind == "raw" ? InstanceKind::kRaw : InstanceKind::kCoded;
    g.users = a.users;
    g.packets = a.packets;
    g.modulus = a.modulus;
    g.coverage = a.rows;
    g.seed = a.seed;
    try {
      inst = generate_instance(g);
    } catch (const InfeasibleInstance& e) {
      throw ExitWith{kInfeasible, e.what()};
    }
  }
  const std::string digest = io::instance_digest(*inst);
  if (a.out.empty()) {
    emit(io::instance_to_json(*inst));
  } else {
    io::write_json_file(a.out, io::instance_to_json(*inst));
    emit({{"command", "gen"}, {"digest", digest}, {"path", a.out}, {"seed", a.seed}});
  }
  std::cerr << "instance " << digest << ": m=" << inst->users() << " N=" << inst->packets()
            << " q=" << inst->field().order() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  std::string cost = "linear";
  std::vector<double> weights;
  std::string table;
  std::optional<long> beta;
  std::vector<long> caps;
  std::string backend = "sfm";
  std::uint64_t seed = 0;
  std::string schedule_out;
};

CostFunction make_cost(const SolveArgs& a, int m) {
  if (a.cost == "fair") return CostFunction::fair(m);
  if (a.cost == "table") {
    if (a.table.empty()) throw ExitWith{kUsage, "--cost table needs a derivative file"};
    return io::cost_table_from_json(io::read_json_file(a.table));
  }
  return CostFunction::linear(a.weights.empty() ? std::vector<double>(m, 1.0) : a.weights);
}

int cmd_solve(const SolveArgs& a) {
  const Stopwatch clock;
  const auto inst = load_instance(a.instance);
  const CutSetOracle oracle(inst);
  const int m = inst->users();
  const CostFunction cost = make_cost(a, m);
  cost.check_users(m);
  CapacityVector caps{a.caps};
  caps.check(m);

  json result = {{"backend", a.backend}, {"cost", testing::cost_json(cost)}, {"caps", testing::caps_json(caps)}};
  bool feasible = false;
  int code = kOk;
  std::string summary;

  if (a.backend == "randomized") {
    const RngSpec spec{a.seed, 0};
    result["rng"] = {{"family", RngSpec::kFamily}, {"seed", spec.seed}, {"stream", spec.stream}};
    netcode::RandomizedResult run;
    if (a.beta) {
      run = netcode::randomized_alloc(*inst, *a.beta, cost, caps, spec);
      result["beta"] = *a.beta;
    } else {
      const auto best = netcode::randomized_min_cost(*inst, cost, caps, spec);
      if (best.feasible) {
        run = best.allocation;
        result["beta"] = best.beta;
        result["beta_min"] = best.beta_min;
      }
    }
    feasible = run.feasible;
    result["feasible"] = feasible;
    result["rates"] = run.rates;
    result["rounds_completed"] = run.rounds_completed;
    result["transmit_sets"] = sets_json(run.transmit_sets);
    if (feasible) {
      const auto rep = netcode::verify_decodable(*inst, run.schedule);
      result["cost_value"] = cost.total(run.rates);
      result["decodable"] = decodability_json(rep);
      if (!a.schedule_out.empty()) {
        io::write_json_file(a.schedule_out, io::schedule_to_json(run.schedule));
        result["schedule"] = a.schedule_out;
      }
      if (!rep.all) {
        code = kConstruction;
        summary = "schedule completed but not every user decodes; retry with another seed or a larger q";
      }
    } else {
      code = kInfeasible;
      summary = "infeasible: no transmitter available after " + std::to_string(run.rounds_completed) + " rounds";
    }
  } else {
    SolverOptions opts;
    if (a.backend == "subgradient") opts.backend = Backend::kSubgradient;
    if (a.beta) {
      const HValue h = eval_h(oracle, *a.beta, cost, caps, opts);
      feasible = h.feasible;
      result["beta"] = *a.beta;
      result["feasible"] = h.feasible;
      result["rates"] = h.rates;
      if (cost.kind() != CostKind::kLinear) {
        const auto trace = convex_alloc(oracle, *a.beta, cost, caps, opts);
        result["transmit_sets"] = sets_json(trace.transmit_sets);
        result["rounds_completed"] = trace.achieved;
      } else {
        result["achieved_sum"] = h.achieved;
      }
      if (h.feasible) result["cost_value"] = h.value;
    } else {
      const MinCostResult mc = min_cost(oracle, cost, caps, opts);
      feasible = mc.feasible;
      result["feasible"] = mc.feasible;
      if (mc.feasible) {
        result["beta"] = mc.beta;
        result["beta_min"] = mc.beta_min;
        result["rates"] = mc.rates;
        result["cost_value"] = mc.value;
      }
    }
    if (!feasible) {
      code = kInfeasible;
      summary = a.beta ? "infeasible: budget " + std::to_string(*a.beta) + " admits no rate vector"
                       : "infeasible: capacities rule out every budget";
    }
  }

  emit({{"command", "solve"},
        {"instance", a.instance},
        {"digest", io::instance_digest(*inst)},
        {"result", result},
        {"timing", {{"seconds", clock.seconds()}}}});
  if (summary.empty()) {
    summary = "beta=" + result.value("beta", json(0)).dump() + " rates=" + result["rates"].dump();
    if (result.contains("cost_value")) summary += " cost=" + result["cost_value"].dump();
  }
  std::cerr << summary << '\n';
  return code;
}

// ---------------------------------------------------------------------------

struct CodeArgs {
  std::string instance;
  std::vector<long> rates;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int max_retries = 64;
  std::string out;
};

int cmd_code(const CodeArgs& a) {
  const Stopwatch clock;
  const auto inst = load_instance(a.instance);
  netcode::CodeResult code;
  try {
    code = netcode::construct_code(*inst, a.rates, RngSpec{a.seed, a.stream}, a.max_retries);
  } catch (const InfeasibleRates& e) {
    emit({{"command", "code"}, {"error", "infeasible-rates"}, {"message", e.what()}, {"rates", a.rates}});
    throw ExitWith{kInfeasible, e.what()};
  } catch (const ConstructionFailed& e) {
    emit({{"command", "code"}, {"error", "construction-failed"}, {"attempts", e.attempts()},
          {"message", e.what()}});
    throw ExitWith{kConstruction, e.what()};
  }
  const json schedule = io::schedule_to_json(code.schedule);
  json report = {{"command", "code"},
                 {"digest", io::instance_digest(*inst)},
                 {"rates", a.rates},
                 {"attempts", code.attempts},
                 {"rng", {{"family", RngSpec::kFamily}, {"seed", a.seed}, {"stream", a.stream}}},
                 {"timing", {{"seconds", clock.seconds()}}}};
  if (a.out.empty()) {
    report["schedule"] = schedule;
  } else {
    io::write_json_file(a.out, schedule);
    report["schedule"] = a.out;
  }
  emit(report);
  std::cerr << "decodable schedule after " << code.attempts << " attempt(s)\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string instance;
  std::string schedule;
};

int cmd_verify(const VerifyArgs& a) {
  const auto inst = load_instance(a.instance);
  const auto s = load_schedule(*inst, a.schedule);
  const auto rep = netcode::verify_decodable(*inst, s);
  emit({{"command", "verify"},
        {"digest", io::instance_digest(*inst)},
        {"rates", s.rates(inst->users())},
        {"decodable", decodability_json(rep)}});
  for (std::size_t i = 0; i < rep.per_user.size(); ++i) {
    std::cerr << "user " << i + 1 << ": " << (rep.per_user[i] ? "decodable" : "NOT decodable") << '\n';
  }
  return rep.all ? kOk : kDecode;
}

// ---------------------------------------------------------------------------

struct DecodeArgs {
  std::string instance;
  std::string schedule;
  int user = 1;
  std::string truth;
  std::uint64_t seed = 0;
};

std::vector<gf::Element> read_packets(const std::string& path, const ProblemInstance& inst) {
  json j = io::read_json_file(path);
  if (j.is_object() && j.contains("w")) j = j.at("w");
  if (!j.is_array() || j.size() != inst.packets()) throw FormatError(path + ": expected N packet values");
  std::vector<gf::Element> w;
  for (const auto& x : j) {
    if (!x.is_number_unsigned() || x.get<std::uint64_t>() >= inst.field().order()) {
      throw FormatError(path + ": packet values must be field elements");
    }
    w.push_back(x.get<gf::Element>());
  }
  return w;
}

int cmd_decode(const DecodeArgs& a) {
  const auto inst = load_instance(a.instance);
  const auto s = load_schedule(*inst, a.schedule);
  if (a.user < 1 || a.user > inst->users()) throw ExitWith{kUsage, "--user must be between 1 and m"};
  std::vector<gf::Element> w;
  if (!a.truth.empty()) {
    w = read_packets(a.truth, *inst);
  } else {
    CounterRng rng(RngSpec{a.seed, 0});
    for (std::size_t k = 0; k < inst->packets(); ++k)
      w.push_back(static_cast<gf::Element>(rng.uniform(inst->field().order())));
  }
  const auto own = netcode::observe(*inst, w);
  const auto sent = netcode::transmissions(s, w);
  std::vector<gf::Element> recovered;
  try {
    recovered = netcode::decode(*inst, a.user - 1, s, own[a.user - 1], sent);
  } catch (const NotDecodable& e) {
    emit({{"command", "decode"}, {"user", a.user}, {"error", "not-decodable"}, {"message", e.what()}});
    throw ExitWith{kDecode, e.what()};
  }
  const bool match = recovered == w;
  emit({{"command", "decode"},
        {"digest", io::instance_digest(*inst)},
        {"user", a.user},
        {"packets", recovered},
        {"truth", a.truth.empty() ? json{{"synthetic_seed", a.seed}} : json(a.truth)},
        {"match", match}});
  std::cerr << "user " << a.user << (match ? " recovered the file" : " decoded packets differ from truth") << '\n';
  return match ? kOk : kDecode;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string suite = "default";
  int max_m = 4;
  int max_n = 6;
  long trials = 50;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> moduli;
  std::string counterexample_out = "dexchange-counterexample.json";
};

int cmd_validate(const ValidateArgs& a) {
  std::vector<testing::CheckResult> results;
  if (a.suite == "paper-examples") {
    results = testing::worked_example_checks();
  } else if (a.suite == "rlnc") {
    const auto moduli = a.moduli.empty() ? std::vector<std::uint64_t>{19, 257} : a.moduli;
    for (std::uint64_t q : moduli) {
      if (!gf::is_prime(q) || q <= 3) throw ExitWith{kUsage, "--q must be a prime above the user count"};
    }
    results.push_back(testing::check_rlnc(moduli, a.trials, a.seed));
  } else if (a.suite == "default") {
    if (a.max_m < 1 || a.max_m > 6) throw ExitWith{kUsage, "--max-m must be between 1 and 6"};
    if (a.max_n < 1 || a.max_n > 8) throw ExitWith{kUsage, "--max-n must be between 1 and 8"};
    testing::SuiteOptions opt;
    opt.instances = static_cast<int>(a.trials);
    opt.max_users = a.max_m;
    opt.max_packets = a.max_n;
    opt.seed = a.seed;
    if (!a.moduli.empty()) opt.moduli = a.moduli;
    const auto cases = testing::random_suite(opt);
    results.push_back(testing::check_oracle_equivalence(cases));
    results.push_back(testing::check_subgradient_agreement(cases));
    results.push_back(testing::check_submodularity(cases));
    results.push_back(testing::check_h_convexity(cases));
    results.push_back(testing::check_restriction_identity(cases));
    results.push_back(testing::check_dual_maximizer(cases, a.seed));
    results.push_back(testing::check_transmit_set_equivalence(cases, a.seed));
  } else {
    throw ExitWith{kUsage, "unknown suite " + a.suite};
  }

  bool all = true;
  json rows = json::array();
  json failures = json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    rows.push_back({{"name", r.name}, {"passed", r.passed}, {"checks", r.checks}, {"detail", r.detail},
                    {"seconds", r.seconds}});
    if (!r.passed) failures.push_back({{"property", r.name}, {"detail", r.detail}, {"counterexample", r.counterexample}});
    std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
  }
  json report = {{"command", "validate"}, {"suite", a.suite}, {"seed", a.seed}, {"results", rows}, {"passed", all}};
  if (!all) {
    io::write_json_file(a.counterexample_out, failures);
    report["counterexample"] = a.counterexample_out;
  }
  emit(report);
  return all ? kOk : kProperty;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative data exchange: rate allocation and network coding"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a problem instance");
  g->add_option("--kind", gen.kind, "raw (packet subsets) or coded (random rows)")
      ->check(CLI::IsMember({"raw", "coded"}));
  g->add_option("--preset", gen.preset, "Built-in instance (example1: the three-user, six-packet example)");
  g->add_option("--m", gen.users, "Number of users")->check(CLI::Range(1, kMaxUsers));
  g->add_option("--n", gen.packets, "Number of packets N")->check(CLI::PositiveNumber);
  g->add_option("--q", gen.modulus, "Prime field order")->check([](const std::string& s) {
    try {
      return gf::is_prime(std::stoull(s)) ? std::string{} : std::string{"q must be prime"};
    } catch (...) {
      return std::string{"q must be an integer"};
    }
  });
  g->add_option("--rows", gen.rows, "Rows per user, comma separated")->delimiter(',');
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("-o,--out", gen.out, "Write the instance here instead of stdout");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Minimum-cost rate allocation");
  s->add_option("instance", solve.instance, "Instance file")->required();
  s->add_option("--cost", solve.cost, "linear, fair or table")->check(CLI::IsMember({"linear", "fair", "table"}));
  s->add_option("--weights", solve.weights, "Linear weights, comma separated")->delimiter(',');
  s->add_option("--table", solve.table, "Derivative table file for --cost table");
  s->add_option("--beta", solve.beta, "Fixed sum-rate budget");
  s->add_option("--caps", solve.caps, "Per-user transmission caps, comma separated")->delimiter(',');
  s->add_option("--backend", solve.backend, "sfm, subgradient or randomized")
      ->check(CLI::IsMember({"sfm", "subgradient", "randomized"}));
  s->add_option("--seed", solve.seed, "Seed for the randomized backend");
  s->add_option("--schedule-out", solve.schedule_out, "Randomized backend: write the schedule here");

  CodeArgs code;
  auto* c = app.add_subcommand("code", "Construct a decodable code for a rate vector");
  c->add_option("instance", code.instance, "Instance file")->required();
  c->add_option("--rates", code.rates, "Rate vector, comma separated")->delimiter(',')->required();
  c->add_option("--seed", code.seed, "Random seed");
  c->add_option("--stream", code.stream, "Random stream");
  c->add_option("--max-retries", code.max_retries, "Attempts before giving up")->check(CLI::PositiveNumber);
  c->add_option("-o,--out", code.out, "Write the schedule here");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check that every user can decode a schedule");
  v->add_option("instance", verify.instance, "Instance file")->required();
  v->add_option("schedule", verify.schedule, "Schedule file")->required();

  DecodeArgs decode;
  auto* d = app.add_subcommand("decode", "Reconstruct the packets at one user");
  d->add_option("instance", decode.instance, "Instance file")->required();
  d->add_option("schedule", decode.schedule, "Schedule file")->required();
  d->add_option("--user", decode.user, "Decoding user (1-based)")->required();
  d->add_option("--truth", decode.truth, "Packet vector file; random packets from --seed when absent");
  d->add_option("--seed", decode.seed, "Seed for synthetic packets");

  ValidateArgs validate;
  auto* val = app.add_subcommand("validate", "Cross-check solvers against exhaustive references");
  val->add_option("--suite", validate.suite, "default, paper-examples or rlnc")
      ->check(CLI::IsMember({"default", "paper-examples", "rlnc"}));
  val->add_option("--max-m", validate.max_m, "Largest user count in random instances");
  val->add_option("--max-n", validate.max_n, "Largest packet count in random instances");
  val->add_option("--trials", validate.trials, "Random instances (default suite) or coding trials (rlnc)")
      ->check(CLI::PositiveNumber);
  val->add_option("--seed", validate.seed, "Random seed");
  val->add_option("--q", validate.moduli, "Field orders to use, comma separated")->delimiter(',');
  val->add_option("--counterexample-out", validate.counterexample_out, "Where to write failing cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_solve(solve);
    if (*c) return cmd_code(code);
    if (*v) return cmd_verify(verify);
    if (*d) return cmd_decode(decode);
    if (*val) return cmd_validate(validate);
  } catch (const ExitWith& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const InfeasibleRates& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
