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

#ifndef DEXCHANGE_COST_HPP_
#define DEXCHANGE_COST_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dexchange/model.hpp"

namespace dexchange {

// Two discrete derivatives closer than this are treated as equal, and the
// lower user index wins.
inline constexpr double kDerivativeTieTolerance = 1e-12;

enum class CostKind { kLinear, kFair, kTable };

// Separable cost sum_i phi_i(R_i), with every phi_i convex, non-decreasing
// and phi_i(0) = 0. Each phi_i is described through its discrete derivatives
// d_i(r) = phi_i(r) - phi_i(r-1), r >= 1.
class CostFunction {
 public:
  // phi_i(R) = alpha_i R with alpha_i > 0.
  static CostFunction linear(std::vector<double> weights) {
    for (double w : weights) {
      if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("linear weights must be positive");
    }
    CostFunction c(CostKind::kLinear, static_cast<int>(weights.size()));
    c.weights_ = std::move(weights);
    return c;
  }

  // phi_i(R) = R log R (natural log) for every user.
  static CostFunction fair(int users) { return CostFunction(CostKind::kFair, users); }

  // Explicit derivative sequences d_i(1), d_i(2), ...; each must be
  // non-negative and non-decreasing. Past the end of a sequence its last
  // value repeats (an empty sequence means phi_i == 0).
  static CostFunction table(std::vector<std::vector<double>> derivatives) {
    for (std::size_t i = 0; i < derivatives.size(); ++i) {
      const auto& d = derivatives[i];
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (!(d[k] >= 0) || !std::isfinite(d[k])) {
          throw std::invalid_argument("table derivatives of user " + std::to_string(i + 1) +
                                      " must be finite and non-negative");
        }
        if (k > 0 && d[k] < d[k - 1]) {
          throw std::invalid_argument("table derivatives of user " + std::to_string(i + 1) +
                                      " must be non-decreasing");
        }
      }
    }
    CostFunction c(CostKind::kTable, static_cast<int>(derivatives.size()));
    c.table_ = std::move(derivatives);
    return c;
  }

  CostKind kind() const { return kind_; }
  int users() const { return users_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& table() const { return table_; }

  // d_i(r) for r >= 1.
  double derivative(int user, long r) const {
    if (r < 1) throw std::invalid_argument("discrete derivative needs r >= 1");
    switch (kind_) {
      case CostKind::kLinear:
        return weights_.at(user);
      case CostKind::kFair:
        return xlogx(r) - xlogx(r - 1);
      case CostKind::kTable: {
        const auto& d = table_.at(user);
        if (d.empty()) return 0.0;
        return r <= static_cast<long>(d.size()) ? d[r - 1] : d.back();
      }
    }
    return 0.0;
  }

  double value(int user, long r) const {
    if (r < 0) throw std::invalid_argument("cost is defined for non-negative rates");
    switch (kind_) {
      case CostKind::kLinear:
        return weights_.at(user) * static_cast<double>(r);
      case CostKind::kFair:
        return xlogx(r);
      case CostKind::kTable: {
        double total = 0.0;
        for (long k = 1; k <= r; ++k) total += derivative(user, k);
        return total;
      }
    }
    return 0.0;
  }

  double total(const RateVector& rates) const {
    check_users(static_cast<int>(rates.size()));
    double sum = 0.0;
    for (int i = 0; i < static_cast<int>(rates.size()); ++i) sum += value(i, rates[i]);
    return sum;
  }

  // Throws unless the cost covers exactly `m` users (fair costs cover any m).
  void check_users(int m) const {
    if (kind_ != CostKind::kFair && users_ != m) {
      throw std::invalid_argument("cost function describes " + std::to_string(users_) +
                                  " users, instance has " + std::to_string(m));
    }
  }

  std::string name() const {
    switch (kind_) {
      case CostKind::kLinear: return "linear";
      case CostKind::kFair: return "fair";
      case CostKind::kTable: return "table";
    }
    return "?";
  }

 private:
  CostFunction(CostKind kind, int users) : kind_(kind), users_(users) {}

  static double xlogx(long r) {
    return r <= 1 ? 0.0 : static_cast<double>(r) * std::log(static_cast<double>(r));
  }

  CostKind kind_;
  int users_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> table_;
};

// Optional per-user transmission caps; an empty vector means unbounded.
struct CapacityVector {
  std::vector<long> caps;

  static CapacityVector unbounded() { return {}; }

  bool bounded() const { return !caps.empty(); }
  long cap(int user) const {
    return caps.empty() ? std::numeric_limits<long>::max() : caps.at(user);
  }
  void check(int m) const {
    if (caps.empty()) return;
    if (static_cast<int>(caps.size()) != m) throw std::invalid_argument("capacity vector has wrong length");
    for (long c : caps)
      if (c < 0) throw std::invalid_argument("capacities must be non-negative");
  }
  // c(M), saturating for unbounded caps.
  long total() const {
    if (caps.empty()) return std::numeric_limits<long>::max();
    long s = 0;
    for (long c : caps) s += c;
    return s;
  }
};

}  // namespace dexchange

#endif  // DEXCHANGE_COST_HPP_
