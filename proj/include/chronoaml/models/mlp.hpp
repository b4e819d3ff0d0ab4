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

inline MlpParams init_mlp_params(std::size_t features, const MlpConfig& cfg) {
  RngStream rng = RngStream(cfg.seed).derive(0x20);
  MlpParams p;
  p.hidden_weights = glorot_uniform(features, cfg.hidden, rng);
  p.hidden_bias = DenseMatrix(1, cfg.hidden);
  p.output_weights = glorot_uniform(cfg.hidden, 2, rng);
  p.output_bias = DenseMatrix(1, 2);
  return p;
}

struct MlpActivations {
  DenseMatrix hidden_pre;
  DenseMatrix hidden;
  DenseMatrix probs;
};

inline MlpActivations mlp_activations(const MlpParams& p, const DenseMatrix& x) {
  MlpActivations a;
  a.hidden_pre = matmul(x, p.hidden_weights);
  add_row_bias(a.hidden_pre, p.hidden_bias);
  a.hidden = relu(a.hidden_pre);
  DenseMatrix z = matmul(a.hidden, p.output_weights);
  add_row_bias(z, p.output_bias);
  a.probs = softmax_rows(z);
  return a;
}

inline DenseMatrix mlp_forward(const MlpParams& p, const DenseMatrix& x) {
  return mlp_activations(p, x).probs;
}

inline LossAndGrads mlp_loss(const MlpParams& p, const DenseMatrix& x, std::span<const int> y,
                             std::span<const std::size_t> mask, ClassWeights w) {
  const MlpActivations a = mlp_activations(p, x);
  LossAndGrads out;
  out.loss = weighted_cross_entropy(a.probs, y, w, mask).loss;
  const DenseMatrix dz2 = weighted_cross_entropy_grad(a.probs, y, w, mask);
  const DenseMatrix dh = matmul_nt(dz2, p.output_weights);
  const DenseMatrix dz1 = relu_backward(dh, a.hidden_pre);
  out.grads.push_back(matmul_tn(x, dz1));
  out.grads.push_back(column_sums(dz1));
  out.grads.push_back(matmul_tn(a.hidden, dz2));
  out.grads.push_back(column_sums(dz2));
  return out;
}

// One ReLU hidden layer, softmax output, full-batch Adam.
inline ModelArtifact train_mlp(const DenseMatrix& x, std::span<const int> y,
                               std::span<const std::size_t> mask, const MlpConfig& cfg = {}) {
  require_two_classes(y, mask, "train_mlp");
  require_finite(x, "train_mlp");
  if (cfg.hidden == 0) throw ConfigError("train_mlp: hidden width must be positive");
  MlpParams p = init_mlp_params(x.cols(), cfg);
  ModelArtifact a;
  a.family = ModelFamily::mlp;
  a.feature_count = x.cols();
  a.hyperparameters = cfg;
  a.seed = cfg.seed;
  a.loss_trace = adam_train(p.tensors(), cfg.epochs, cfg.learning_rate,
                            [&] { return mlp_loss(p, x, y, mask, cfg.class_weights); });
  a.params = std::move(p);
  return a;
}

}  // namespace chronoaml
