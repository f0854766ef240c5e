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

// JSON formats for instances, schedules and cost tables. Users and rounds
// are numbered from 1 in files.
//
//   instance:  {"q": 257, "N": 6, "users": [{"rows": [[1,0,...], ...]}, ...]}
//   schedule:  {"q": 19, "N": 6, "entries": [{"round": 1, "user": 1,
//               "b": [...], "u": [...]}, ...], "rng": {"seed": 0, "stream": 0}}
//   cost table: {"derivatives": [[d_1(1), d_1(2), ...], ...]}

#ifndef DEXCHANGE_IO_HPP_
#define DEXCHANGE_IO_HPP_

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dexchange/cost.hpp"
#include "dexchange/errors.hpp"
#include "dexchange/gf.hpp"
#include "dexchange/model.hpp"
#include "dexchange/netcode.hpp"

namespace dexchange::io {

using nlohmann::json;

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

inline std::uint64_t non_negative(const json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw FormatError(what + " must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline std::vector<gf::Element> element_row(const json& j, std::uint64_t q, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + " must be an array");
  std::vector<gf::Element> row;
  row.reserve(j.size());
  for (const auto& x : j) {
    const std::uint64_t v = non_negative(x, what + " entry");
    if (v >= q) throw FormatError(what + " entry " + std::to_string(v) + " is not below q = " + std::to_string(q));
    row.push_back(static_cast<gf::Element>(v));
  }
  return row;
}

inline std::uint64_t modulus(const json& j, const std::string& where) {
  const std::uint64_t q = non_negative(field(j, "q", where), "q");
  if (!gf::is_prime(q)) throw FormatError("q = " + std::to_string(q) + " is not prime");
  if (q > 0xffffffffULL) throw FormatError("q must fit in 32 bits");
  return q;
}

}  // namespace detail

inline json instance_to_json(const ProblemInstance& inst) {
  json users = json::array();
  for (const auto& a : inst.observations()) users.push_back({{"rows", a.to_rows()}});
  return {{"q", inst.field().order()}, {"N", inst.packets()}, {"users", users}};
}

// Rejects, with distinct messages, entries >= q, ragged rows and collective
// rank below N.
inline ProblemInstance instance_from_json(const json& j) {
  const std::string where = "instance";
  const std::uint64_t q = detail::modulus(j, where);
  const std::uint64_t n = detail::non_negative(detail::field(j, "N", where), "N");
  if (n == 0) throw FormatError("N must be positive");
  const json& users = detail::field(j, "users", where);
  if (!users.is_array() || users.empty()) throw FormatError("users must be a non-empty array");
  if (users.size() > static_cast<std::size_t>(kMaxUsers)) {
    throw FormatError("at most " + std::to_string(kMaxUsers) + " users are supported");
  }
  const gf::PrimeField f(q);
  std::vector<gf::Matrix> obs;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const std::string who = "user " + std::to_string(i + 1);
    const json& rows = detail::field(users[i], "rows", who);
    if (!rows.is_array()) throw FormatError(who + " rows must be an array");
    gf::Matrix a(f, 0, n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = detail::element_row(rows[r], q, who + " row " + std::to_string(r + 1));
      if (row.size() != n) {
        throw FormatError(who + " row " + std::to_string(r + 1) + " is ragged: " + std::to_string(row.size()) +
                          " entries, expected N = " + std::to_string(n));
      }
      a.append_row(row);
    }
    obs.push_back(std::move(a));
  }
  try {
    return ProblemInstance(f, n, std::move(obs));
  } catch (const InfeasibleInstance& e) {
    throw FormatError(std::string("collective rank below N: ") + e.what());
  }
}

inline json schedule_to_json(const netcode::TransmissionSchedule& s) {
  json entries = json::array();
  for (const auto& e : s.entries) {
    entries.push_back({{"round", e.round}, {"user", e.user + 1}, {"b", e.coefficients}, {"u", e.packet_row}});
  }
  return {{"q", s.modulus},
          {"N", s.packets},
          {"entries", entries},
          {"rng", {{"seed", s.rng.seed}, {"stream", s.rng.stream}}}};
}

inline netcode::TransmissionSchedule schedule_from_json(const json& j) {
  const std::string where = "schedule";
  netcode::TransmissionSchedule s;
  s.modulus = detail::modulus(j, where);
  s.packets = detail::non_negative(detail::field(j, "N", where), "N");
  const json& entries = detail::field(j, "entries", where);
  if (!entries.is_array()) throw FormatError("entries must be an array");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string who = "entry " + std::to_string(k + 1);
    const json& e = entries[k];
    netcode::ScheduleEntry entry;
    entry.round = static_cast<long>(detail::non_negative(detail::field(e, "round", who), who + " round"));
    const std::uint64_t user = detail::non_negative(detail::field(e, "user", who), who + " user");
    if (user < 1) throw FormatError(who + " user numbers start at 1");
    entry.user = static_cast<int>(user - 1);
    entry.coefficients = detail::element_row(detail::field(e, "b", who), s.modulus, who + " b");
    entry.packet_row = detail::element_row(detail::field(e, "u", who), s.modulus, who + " u");
    if (entry.packet_row.size() != s.packets) throw FormatError(who + " u must have N entries");
    s.entries.push_back(std::move(entry));
  }
  if (j.contains("rng")) {
    const json& r = j.at("rng");
    s.rng.seed = detail::non_negative(detail::field(r, "seed", "rng"), "rng seed");
    s.rng.stream = detail::non_negative(detail::field(r, "stream", "rng"), "rng stream");
  }
  return s;
}

inline CostFunction cost_table_from_json(const json& j) {
  const json& d = detail::field(j, "derivatives", "cost table");
  if (!d.is_array()) throw FormatError("derivatives must be an array of arrays");
  std::vector<std::vector<double>> table;
  for (const auto& row : d) {
    if (!row.is_array()) throw FormatError("derivatives must be an array of arrays");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) throw FormatError("derivatives must be numbers");
      r.push_back(x.get<double>());
    }
    table.push_back(std::move(r));
  }
  try {
    return CostFunction::table(std::move(table));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

// FNV-1a over the canonical instance serialization.
inline std::string instance_digest(const ProblemInstance& inst) {
  const std::string text = instance_to_json(inst).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace dexchange::io

#endif  // DEXCHANGE_IO_HPP_
