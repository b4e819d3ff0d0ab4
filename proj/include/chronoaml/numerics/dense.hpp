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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/core/parallel.hpp"
#include "chronoaml/core/rng.hpp"

namespace chronoaml {

// Row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw ShapeError("DenseMatrix: data size does not match shape");
  }
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("DenseMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const DenseMatrix& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
}

inline bool all_finite(const DenseMatrix& m) noexcept {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double v) { return std::isfinite(v); });
}

inline void require_finite(const DenseMatrix& m, const char* what) {
  if (!all_finite(m)) throw RangeError(std::string(what) + ": non-finite entry");
}

// Glorot/Xavier uniform in +-sqrt(6 / (fan_in + fan_out)).
inline DenseMatrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, RngStream& rng) {
  DenseMatrix w(fan_in, fan_out);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
  return w;
}

namespace detail {
// Below this many multiply-adds a kernel runs on the calling thread.
inline constexpr std::size_t kParallelWork = std::size_t{1} << 18;

inline std::size_t rows_per_chunk(std::size_t work_per_row) {
  return std::max<std::size_t>(1, kParallelWork / std::max<std::size_t>(1, work_per_row));
}
}  // namespace detail

// a (n x k) * b (k x m). Rows go four at a time so each row of b is loaded
// once per group; every output row still accumulates in p order.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  DenseMatrix c(n, m);
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        std::size_t i = begin;
        for (; i + 4 <= end; i += 4) {
          double* o0 = c.row(i).data();
          double* o1 = c.row(i + 1).data();
          double* o2 = c.row(i + 2).data();
          double* o3 = c.row(i + 3).data();
          const double* a0 = a.row(i).data();
          const double* a1 = a.row(i + 1).data();
          const double* a2 = a.row(i + 2).data();
          const double* a3 = a.row(i + 3).data();
          for (std::size_t p = 0; p < k; ++p) {
            const double s0 = a0[p], s1 = a1[p], s2 = a2[p], s3 = a3[p];
            if (s0 == 0.0 && s1 == 0.0 && s2 == 0.0 && s3 == 0.0) continue;
            const double* bp = b.row(p).data();
            for (std::size_t j = 0; j < m; ++j) {
              const double v = bp[j];
              o0[j] += s0 * v;
              o1[j] += s1 * v;
              o2[j] += s2 * v;
              o3[j] += s3 * v;
            }
          }
        }
        for (; i < end; ++i) {
          double* out = c.row(i).data();
          const double* ai = a.row(i).data();
          for (std::size_t p = 0; p < k; ++p) {
            const double s = ai[p];
            if (s == 0.0) continue;
            const double* bp = b.row(p).data();
            for (std::size_t j = 0; j < m; ++j) out[j] += s * bp[j];
          }
        }
      },
      detail::rows_per_chunk(k * m));
  return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

// a^T (k x n) * b (n x m); a is n x k.
inline DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: row counts differ");
  return matmul(transpose(a), b);
}

// a (n x m) * b^T (m x k); b is k x m.
inline DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: column counts differ");
  return matmul(a, transpose(b));
}

inline void add_inplace(DenseMatrix& a, const DenseMatrix& b, double scale = 1.0) {
  require_same_shape(a, b, "add_inplace");
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += scale * bv[i];
}

inline DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "hadamard");
  DenseMatrix c = a;
  auto cv = c.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < cv.size(); ++i) cv[i] *= bv[i];
  return c;
}

// Adds a 1 x cols bias row to every row.
inline void add_row_bias(DenseMatrix& a, const DenseMatrix& bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) throw ShapeError("add_row_bias: bias shape");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias(0, j);
  }
}

inline DenseMatrix column_sums(const DenseMatrix& a) {
  DenseMatrix s(1, a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(0, j) += a(i, j);
  return s;
}

inline DenseMatrix gather_rows(const DenseMatrix& a, std::span<const std::size_t> rows) {
  DenseMatrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) throw RangeError("gather_rows: row index out of range");
    std::copy_n(a.row(rows[i]).data(), a.cols(), out.row(i).data());
  }
  return out;
}

inline DenseMatrix concat_columns(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("concat_columns: row counts differ");
  DenseMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::copy_n(a.row(i).data(), a.cols(), out.row(i).data());
    std::copy_n(b.row(i).data(), b.cols(), out.row(i).data() + a.cols());
  }
  return out;
}

inline double max_abs(const DenseMatrix& a) noexcept {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace chronoaml
