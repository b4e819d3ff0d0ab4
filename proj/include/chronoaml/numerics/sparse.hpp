// Copyright 2026 The chronoaml Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/core/parallel.hpp"
#include "chronoaml/numerics/dense.hpp"

namespace chronoaml {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse rows. Column indices are sorted within a row and no
// stored value is zero.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Duplicate coordinates are summed; entries that end up zero are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets) {
    for (const auto& t : triplets)
      if (t.row >= rows || t.col >= cols) throw RangeError("SparseMatrix: triplet out of range");
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    SparseMatrix s;
    s.rows_ = rows;
    s.cols_ = cols;
    s.offsets_.assign(rows + 1, 0);
    for (std::size_t i = 0; i < triplets.size();) {
      std::size_t j = i;
      double v = 0.0;
      while (j < triplets.size() && triplets[j].row == triplets[i].row &&
             triplets[j].col == triplets[i].col)
        v += triplets[j++].value;
      if (v != 0.0) {
        s.indices_.push_back(triplets[i].col);
        s.values_.push_back(v);
        ++s.offsets_[triplets[i].row + 1];
      }
      i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) s.offsets_[r + 1] += s.offsets_[r];
    return s;
  }

  static SparseMatrix identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const std::size_t> row_indices(std::size_t r) const noexcept {
    return {indices_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::span<const double> row_values(std::size_t r) const noexcept {
    return {values_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }

  double at(std::size_t r, std::size_t c) const {
    const auto idx = row_indices(r);
    const auto it = std::lower_bound(idx.begin(), idx.end(), c);
    if (it == idx.end() || *it != c) return 0.0;
    return values_[offsets_[r] + static_cast<std::size_t>(it - idx.begin())];
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t p = offsets_[r]; p < offsets_[r + 1]; ++p)
        t.push_back({r, indices_[p], values_[p]});
    return t;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t p = offsets_[r]; p < offsets_[r + 1]; ++p) d(r, indices_[p]) = values_[p];
    return d;
  }

  SparseMatrix transposed() const {
    auto t = triplets();
    for (auto& e : t) std::swap(e.row, e.col);
    return from_triplets(cols_, rows_, std::move(t));
  }

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> indices_;
  std::vector<double> values_;
};

// D^{-1/2} (A + I) D^{-1/2}, D = row sums of A + I. With symmetrize, A is
// first replaced by its pattern union with A^T (entry = max of the pair).
inline SparseMatrix normalize_adjacency(const SparseMatrix& a, bool symmetrize) {
  if (a.rows() != a.cols()) throw ShapeError("normalize_adjacency: matrix is not square");
  const std::size_t n = a.rows();
  std::vector<Triplet> t = a.triplets();
  if (symmetrize) {
    const auto forward = t;
    for (const auto& e : forward) t.push_back({e.col, e.row, e.value});
    std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
      return std::tie(x.row, x.col) < std::tie(y.row, y.col);
    });
    std::vector<Triplet> merged;
    merged.reserve(t.size());
    for (const auto& e : t) {
      if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
        merged.back().value = std::max(merged.back().value, e.value);
      else
        merged.push_back(e);
    }
    t = std::move(merged);
  }
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  const SparseMatrix tilde = SparseMatrix::from_triplets(n, n, std::move(t));

  std::vector<double> inv_sqrt_degree(n);
  for (std::size_t r = 0; r < n; ++r) {
    double d = 0.0;
    for (double v : tilde.row_values(r)) d += v;
    inv_sqrt_degree[r] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  std::vector<Triplet> out;
  out.reserve(tilde.nnz());
  for (std::size_t r = 0; r < n; ++r) {
    const auto idx = tilde.row_indices(r);
    const auto val = tilde.row_values(r);
    for (std::size_t p = 0; p < idx.size(); ++p)
      out.push_back({r, idx[p], val[p] * inv_sqrt_degree[r] * inv_sqrt_degree[idx[p]]});
  }
  return SparseMatrix::from_triplets(n, n, std::move(out));
}

// Stacks square blocks along the diagonal.
inline SparseMatrix block_diagonal(std::span<const SparseMatrix> blocks) {
  std::size_t n = 0, m = 0, nnz = 0;
  for (const auto& b : blocks) {
    n += b.rows();
    m += b.cols();
    nnz += b.nnz();
  }
  std::vector<Triplet> t;
  t.reserve(nnz);
  std::size_t r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    for (auto e : b.triplets()) t.push_back({e.row + r0, e.col + c0, e.value});
    r0 += b.rows();
    c0 += b.cols();
  }
  return SparseMatrix::from_triplets(n, m, std::move(t));
}

// Exact sparse x dense product; each output row is reduced sequentially in
// stored column order.
inline DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.cols() != d.rows()) throw ShapeError("spmm: inner dimensions differ");
  DenseMatrix out(s.rows(), d.cols());
  const std::size_t m = d.cols();
  parallel_for(
      s.rows(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
          double* o = out.row(r).data();
          const auto idx = s.row_indices(r);
          const auto val = s.row_values(r);
          for (std::size_t p = 0; p < idx.size(); ++p) {
            const double* src = d.row(idx[p]).data();
            for (std::size_t j = 0; j < m; ++j) o[j] += val[p] * src[j];
          }
        }
      },
      4096);
  return out;
}

}  // namespace chronoaml
