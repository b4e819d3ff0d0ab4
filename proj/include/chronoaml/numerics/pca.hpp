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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/core/rng.hpp"
#include "chronoaml/numerics/dense.hpp"

namespace chronoaml {

struct PcaOptions {
  std::size_t dims = 2;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 200000;
  double tolerance = 1e-14;
};

struct PcaModel {
  DenseMatrix mean;                // 1 x F
  DenseMatrix axes;                // F x dims, unit columns (zero for degenerate axes)
  std::vector<double> variances;   // eigenvalue per axis
};

// Principal axes by power iteration with deflation on the sample covariance.
// Each axis is signed so that its largest-magnitude loading is positive.
inline PcaModel pca_fit(const DenseMatrix& x, PcaOptions opts = {}) {
  if (x.rows() < opts.dims) throw RangeError("pca_fit: fewer rows than projection dims");
  require_finite(x, "pca_fit");
  const std::size_t n = x.rows(), f = x.cols();
  PcaModel model;
  model.mean = column_sums(x);
  for (double& v : model.mean.values()) v /= static_cast<double>(n);
  DenseMatrix centered = x;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) centered(i, j) -= model.mean(0, j);

  DenseMatrix cov = matmul_tn(centered, centered);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (double& v : cov.values()) v /= denom;
  double trace = 0.0;
  for (std::size_t j = 0; j < f; ++j) trace += cov(j, j);

  model.axes = DenseMatrix(f, opts.dims);
  model.variances.assign(opts.dims, 0.0);
  RngStream rng(opts.seed);
  std::vector<double> v(f), w(f);
  for (std::size_t axis = 0; axis < opts.dims && f > 0; ++axis) {
    if (!(trace > 0.0)) break;
    double norm = 0.0;
    for (double& e : v) {
      e = rng.uniform(-1.0, 1.0);
      norm += e * e;
    }
    norm = std::sqrt(norm);
    for (double& e : v) e /= norm;

    double lambda = 0.0;
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
      for (std::size_t r = 0; r < f; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < f; ++c) s += cov(r, c) * v[c];
        w[r] = s;
      }
      double wn = 0.0;
      for (double e : w) wn += e * e;
      wn = std::sqrt(wn);
      if (wn <= 1e-12 * trace) {
        lambda = 0.0;
        break;
      }
      double diff = 0.0;
      for (std::size_t r = 0; r < f; ++r) {
        const double nv = w[r] / wn;
        diff += (nv - v[r]) * (nv - v[r]);
        v[r] = nv;
      }
      lambda = wn;
      if (std::sqrt(diff) < opts.tolerance) break;
    }
    if (lambda <= 1e-12 * trace) break;  // remaining axes stay zero

    // Rayleigh quotient of the converged unit vector.
    double rq = 0.0;
    for (std::size_t r = 0; r < f; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < f; ++c) s += cov(r, c) * v[c];
      rq += v[r] * s;
    }
    std::size_t lead = 0;
    for (std::size_t r = 1; r < f; ++r)
      if (std::abs(v[r]) > std::abs(v[lead])) lead = r;
    const double sign = v[lead] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < f; ++r) model.axes(r, axis) = sign * v[r];
    model.variances[axis] = rq;
    for (std::size_t r = 0; r < f; ++r)
      for (std::size_t c = 0; c < f; ++c) cov(r, c) -= rq * v[r] * v[c];
  }
  return model;
}

inline DenseMatrix pca_transform(const PcaModel& model, const DenseMatrix& x) {
  if (x.cols() != model.mean.cols()) throw ShapeError("pca_transform: feature count differs");
  DenseMatrix centered = x;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) centered(i, j) -= model.mean(0, j);
  return matmul(centered, model.axes);
}

inline DenseMatrix pca_project(const DenseMatrix& x, PcaOptions opts = {}) {
  return pca_transform(pca_fit(x, opts), x);
}

}  // namespace chronoaml
