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

#include <cstddef>
#include <span>
#include <vector>

#include "chronoaml/core/rng.hpp"
#include "chronoaml/models/params.hpp"
#include "chronoaml/models/training.hpp"
#include "chronoaml/numerics/ops.hpp"

namespace chronoaml {

inline LogRegParams init_logreg_params(std::size_t features, std::uint64_t seed) {
  RngStream rng = RngStream(seed).derive(0x10);
  return {glorot_uniform(features, 2, rng), DenseMatrix(1, 2)};
}

inline DenseMatrix logreg_logits(const LogRegParams& p, const DenseMatrix& x) {
  DenseMatrix z = matmul(x, p.weights);
  add_row_bias(z, p.bias);
  return z;
}

inline DenseMatrix logreg_forward(const LogRegParams& p, const DenseMatrix& x) {
  return softmax_rows(logreg_logits(p, x));
}

// Weighted cross entropy plus l2 * |W|^2 / 2 (bias unpenalized).
inline LossAndGrads logreg_loss(const LogRegParams& p, const DenseMatrix& x, std::span<const int> y,
                                std::span<const std::size_t> mask, ClassWeights w, double l2) {
  const DenseMatrix probs = logreg_forward(p, x);
  LossAndGrads out;
  out.loss = weighted_cross_entropy(probs, y, w, mask).loss;
  double sq = 0.0;
  for (double v : p.weights.values()) sq += v * v;
  out.loss += 0.5 * l2 * sq;
  const DenseMatrix dz = weighted_cross_entropy_grad(probs, y, w, mask);
  DenseMatrix dw = matmul_tn(x, dz);
  add_inplace(dw, p.weights, l2);
  out.grads.push_back(std::move(dw));
  out.grads.push_back(column_sums(dz));
  return out;
}

// Single softmax layer trained full batch with Adam.
inline ModelArtifact train_logreg(const DenseMatrix& x, std::span<const int> y,
                                  std::span<const std::size_t> mask, const LogRegConfig& cfg = {}) {
  require_two_classes(y, mask, "train_logreg");
  require_finite(x, "train_logreg");
  LogRegParams p = init_logreg_params(x.cols(), cfg.seed);
  ModelArtifact a;
  a.family = ModelFamily::logreg;
  a.feature_count = x.cols();
  a.hyperparameters = cfg;
  a.seed = cfg.seed;
  a.loss_trace = adam_train(p.tensors(), cfg.epochs, cfg.learning_rate, [&] {
    return logreg_loss(p, x, y, mask, cfg.class_weights, cfg.l2);
  });
  a.params = std::move(p);
  return a;
}

}  // namespace chronoaml
