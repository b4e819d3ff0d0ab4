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

#include "chronoaml/core/error.hpp"
#include "chronoaml/numerics/dense.hpp"

namespace chronoaml {

inline DenseMatrix softmax_rows(const DenseMatrix& z) {
  DenseMatrix p(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto in = z.row(i);
    auto out = p.row(i);
    if (in.empty()) continue;
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      out[j] = std::exp(in[j] - mx);
      sum += out[j];
    }
    for (double& v : out) v /= sum;
  }
  return p;
}

inline DenseMatrix relu(const DenseMatrix& z) {
  DenseMatrix out = z;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

// grad * 1[pre > 0]
inline DenseMatrix relu_backward(const DenseMatrix& grad, const DenseMatrix& pre) {
  require_same_shape(grad, pre, "relu_backward");
  DenseMatrix out = grad;
  auto o = out.values();
  auto z = pre.values();
  for (std::size_t i = 0; i < o.size(); ++i)
    if (!(z[i] > 0.0)) o[i] = 0.0;
  return out;
}

// Column 0 is licit, column 1 is illicit throughout the library.
struct ClassWeights {
  double licit = 1.0;
  double illicit = 1.0;

  double operator[](int cls) const noexcept { return cls == 1 ? illicit : licit; }
  bool operator==(const ClassWeights&) const = default;
};

inline constexpr double kProbabilityFloor = 1e-15;

struct LossValue {
  double loss = 0.0;
  std::size_t clamped = 0;  // true-class probabilities raised to the floor
};

// (1/|mask|) * sum_{i in mask} w_{y_i} * -log p[i][y_i]
inline LossValue weighted_cross_entropy(const DenseMatrix& probs, std::span<const int> targets,
                                        ClassWeights weights, std::span<const std::size_t> mask) {
  if (mask.empty()) throw ConfigError("weighted_cross_entropy: empty mask");
  if (targets.size() != probs.rows()) throw ShapeError("weighted_cross_entropy: target count");
  LossValue out;
  for (std::size_t i : mask) {
    const int y = targets[i];
    if (y < 0 || static_cast<std::size_t>(y) >= probs.cols())
      throw RangeError("weighted_cross_entropy: masked row has no class target");
    double p = probs(i, static_cast<std::size_t>(y));
    if (p < kProbabilityFloor) {
      p = kProbabilityFloor;
      ++out.clamped;
    }
    out.loss += weights[y] * -std::log(p);
  }
  out.loss /= static_cast<double>(mask.size());
  return out;
}

// Gradient of weighted_cross_entropy with respect to the pre-softmax logits.
inline DenseMatrix weighted_cross_entropy_grad(const DenseMatrix& probs, std::span<const int> targets,
                                               ClassWeights weights,
                                               std::span<const std::size_t> mask) {
  DenseMatrix g(probs.rows(), probs.cols());
  const double scale = 1.0 / static_cast<double>(mask.size());
  for (std::size_t i : mask) {
    const int y = targets[i];
    const double w = weights[y] * scale;
    for (std::size_t c = 0; c < probs.cols(); ++c)
      g(i, c) = w * (probs(i, c) - (static_cast<int>(c) == y ? 1.0 : 0.0));
  }
  return g;
}

}  // namespace chronoaml
