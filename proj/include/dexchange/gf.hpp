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

// Exact arithmetic and dense linear algebra over prime fields GF(p).
//
// Elements are stored as canonical representatives in [0, p). Matrices are
// dense, row-major and immutable once built; every algorithm below works on a
// private copy so shared matrices can be read from several threads.

#ifndef DEXCHANGE_GF_HPP_
#define DEXCHANGE_GF_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dexchange/errors.hpp"

namespace dexchange::gf {

using Element = std::uint32_t;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

// GF(p) for a prime p < 2^32.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p) : p_(static_cast<Element>(p)) {
    if (p > 0xffffffffULL || !is_prime(p)) {
      throw std::invalid_argument("field modulus must be a prime below 2^32, got " +
                                  std::to_string(p));
    }
  }

  Element order() const { return p_; }

  bool contains(std::uint64_t a) const { return a < p_; }

  Element add(Element a, Element b) const {
    std::uint64_t s = std::uint64_t{a} + b;
    return static_cast<Element>(s >= p_ ? s - p_ : s);
  }
  Element sub(Element a, Element b) const {
    return a >= b ? a - b : static_cast<Element>(std::uint64_t{a} + p_ - b);
  }
  Element neg(Element a) const { return a == 0 ? 0 : p_ - a; }
  Element mul(Element a, Element b) const {
    return static_cast<Element>(std::uint64_t{a} * b % p_);
  }
  Element pow(Element a, std::uint64_t e) const {
    Element r = 1 % p_;
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  // Fermat inverse; a^(p-2) == a^-1 for a != 0.
  Element inv(Element a) const {
    if (a == 0) throw DivisionByZero();
    return pow(a, p_ - 2);
  }
  Element div(Element a, Element b) const { return mul(a, inv(b)); }

  // Reduces an arbitrary signed integer into [0, p).
  Element reduce(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    return static_cast<Element>(r < 0 ? r + p_ : r);
  }

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  Element p_;
};

class Matrix {
 public:
  Matrix(PrimeField field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  // Builds from nested rows; every row must have `cols` entries, all < p.
  static Matrix from_rows(PrimeField field, std::size_t cols,
                          const std::vector<std::vector<Element>>& rows) {
    Matrix m(field, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) {
        throw ShapeError("row " + std::to_string(r) + " has " +
                         std::to_string(rows[r].size()) + " entries, expected " +
                         std::to_string(cols));
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (!field.contains(rows[r][c])) {
          throw std::invalid_argument("matrix entry is not a canonical field element");
        }
        m.data_[r * cols + c] = rows[r][c];
      }
    }
    return m;
  }

  static Matrix identity(PrimeField field, std::size_t n) {
    Matrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1 % field.order();
    return m;
  }

  const PrimeField& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  Element operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Element v) {
    if (!field_.contains(v)) throw std::invalid_argument("entry is not canonical");
    data_[r * cols_ + c] = v;
  }

  std::span<const Element> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<std::vector<Element>> to_rows() const {
    std::vector<std::vector<Element>> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
    return out;
  }

  void append_row(std::span<const Element> values) {
    if (values.size() != cols_) throw ShapeError("appended row has wrong width");
    for (Element v : values) {
      if (!field_.contains(v)) throw std::invalid_argument("entry is not canonical");
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  // Stacks `below` under this matrix.
  Matrix vstack(const Matrix& below) const {
    if (below.cols_ != cols_ || !(below.field_ == field_)) {
      throw ShapeError("vstack needs matching width and field");
    }
    Matrix out = *this;
    out.data_.insert(out.data_.end(), below.data_.begin(), below.data_.end());
    out.rows_ += below.rows_;
    return out;
  }

  Matrix transpose() const {
    Matrix t(field_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = (*this)(r, c);
    return t;
  }

  // M * x for a column vector x of length cols().
  std::vector<Element> apply(std::span<const Element> x) const {
    if (x.size() != cols_) throw ShapeError("vector length does not match column count");
    std::vector<Element> y(rows_, 0);
    for (std::size_t r = 0; r < rows_; ++r) {
      Element acc = 0;
      for (std::size_t c = 0; c < cols_; ++c) acc = field_.add(acc, field_.mul((*this)(r, c), x[c]));
      y[r] = acc;
    }
    return y;
  }

  // b * M for a row vector b of length rows().
  std::vector<Element> left_apply(std::span<const Element> b) const {
    if (b.size() != rows_) throw ShapeError("coefficient length does not match row count");
    std::vector<Element> y(cols_, 0);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (b[r] == 0) continue;
      for (std::size_t c = 0; c < cols_; ++c) y[c] = field_.add(y[c], field_.mul(b[r], (*this)(r, c)));
    }
    return y;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Element> data_;
};

// Dimension of the row space. Fraction-free elimination: the pivot for each
// column is the lowest-index remaining row with a nonzero entry, and other
// rows are cleared by cross-multiplication, so no inverses are needed.
inline std::size_t rank(const Matrix& m) {
  const PrimeField& f = m.field();
  std::vector<std::vector<Element>> rows = m.to_rows();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const auto& prow = rows[rank];
    const Element a = prow[col];
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const Element b = rows[r][col];
      if (b == 0) continue;
      for (std::size_t c = col; c < m.cols(); ++c) {
        rows[r][c] = f.sub(f.mul(a, rows[r][c]), f.mul(b, prow[c]));
      }
    }
    ++rank;
  }
  return rank;
}

// Unique w with M w = rhs. M may have more rows than columns, but must have
// full column rank; rhs must be consistent with M.
inline std::vector<Element> solve_full_rank(const Matrix& m, std::span<const Element> rhs) {
  if (rhs.size() != m.rows()) {
    throw ShapeError("right-hand side has " + std::to_string(rhs.size()) +
                     " entries for a matrix with " + std::to_string(m.rows()) + " rows");
  }
  const PrimeField& f = m.field();
  const std::size_t n = m.cols();
  std::vector<std::vector<Element>> aug = m.to_rows();
  for (std::size_t r = 0; r < aug.size(); ++r) {
    if (!f.contains(rhs[r])) throw std::invalid_argument("rhs entry is not canonical");
    aug[r].push_back(rhs[r]);
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = rank;
    while (pivot < aug.size() && aug[pivot][col] == 0) ++pivot;
    if (pivot == aug.size()) {
      throw SingularSystem("matrix has rank below its column count " + std::to_string(n));
    }
    std::swap(aug[rank], aug[pivot]);
    const Element scale = f.inv(aug[rank][col]);
    for (std::size_t c = col; c <= n; ++c) aug[rank][c] = f.mul(aug[rank][c], scale);
    for (std::size_t r = 0; r < aug.size(); ++r) {
      if (r == rank || aug[r][col] == 0) continue;
      const Element factor = aug[r][col];
      for (std::size_t c = col; c <= n; ++c) {
        aug[r][c] = f.sub(aug[r][c], f.mul(factor, aug[rank][c]));
      }
    }
    ++rank;
  }
  for (std::size_t r = n; r < aug.size(); ++r) {
    if (aug[r][n] != 0) throw InconsistentSystem("right-hand side is not in the column space");
  }
  std::vector<Element> w(n);
  for (std::size_t c = 0; c < n; ++c) w[c] = aug[c][n];
  return w;
}

// Row-reduced basis that grows one vector at a time. Used where the rank of
// a matrix is tracked while rows are appended.
class RowBasis {
 public:
  RowBasis(PrimeField field, std::size_t cols) : field_(field), cols_(cols) {}

  std::size_t rank() const { return basis_.size(); }
  std::size_t cols() const { return cols_; }

  // Returns true iff `v` was independent of the current span.
  bool insert(std::span<const Element> v) {
    if (v.size() != cols_) throw ShapeError("basis vector has wrong width");
    std::vector<Element> w(v.begin(), v.end());
    reduce(w);
    std::size_t lead = 0;
    while (lead < cols_ && w[lead] == 0) ++lead;
    if (lead == cols_) return false;
    const Element scale = field_.inv(w[lead]);
    for (auto& x : w) x = field_.mul(x, scale);
    // Keep existing rows reduced against the new pivot.
    for (auto& [p, row] : basis_) {
      if (row[lead] == 0) continue;
      const Element factor = row[lead];
      for (std::size_t c = 0; c < cols_; ++c) row[c] = field_.sub(row[c], field_.mul(factor, w[c]));
    }
    basis_.emplace_back(lead, std::move(w));
    return true;
  }

  void insert_rows(const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) insert(m.row(r));
  }

  bool contains(std::span<const Element> v) const {
    std::vector<Element> w(v.begin(), v.end());
    reduce(w);
    for (Element x : w)
      if (x != 0) return false;
    return true;
  }

 private:
  void reduce(std::vector<Element>& w) const {
    for (const auto& [lead, row] : basis_) {
      const Element factor = w[lead];
      if (factor == 0) continue;
      for (std::size_t c = 0; c < cols_; ++c) w[c] = field_.sub(w[c], field_.mul(factor, row[c]));
    }
  }

  PrimeField field_;
  std::size_t cols_;
  std::vector<std::pair<std::size_t, std::vector<Element>>> basis_;
};

}  // namespace dexchange::gf

#endif  // DEXCHANGE_GF_HPP_
