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
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chronoaml/core/rng.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/models/graph_batch.hpp"
#include "chronoaml/models/params.hpp"
#include "chronoaml/models/training.hpp"
#include "chronoaml/numerics/ops.hpp"
#include "chronoaml/numerics/sparse.hpp"

namespace chronoaml {

// Constant inputs of a propagation problem. AX is computed once because the
// first layer always consumes it.
struct GcnInputs {
  SparseMatrix adjacency;
  SparseMatrix adjacency_t;
  DenseMatrix x;
  DenseMatrix ax;

  GcnInputs(SparseMatrix a, DenseMatrix features)
      : adjacency(std::move(a)), x(std::move(features)) {
    if (adjacency.rows() != adjacency.cols() || adjacency.cols() != x.rows())
      throw ShapeError("gcn: adjacency and feature rows disagree");
    adjacency_t = adjacency.transposed();
    ax = spmm(adjacency, x);
  }
};

struct GcnCache {
  DenseMatrix hidden;  // H1 = ReLU(A X W0)
  DenseMatrix logits;
  DenseMatrix probs;
};

inline GcnParams init_gcn_params(std::size_t features, std::size_t hidden, bool skip,
                                 std::uint64_t seed) {
  RngStream rng = RngStream(seed).derive(0x30);
  GcnParams p;
  p.w0 = glorot_uniform(features, hidden, rng);
  p.w1 = glorot_uniform(hidden, 2, rng);
  if (skip) p.skip_w1 = glorot_uniform(features, 2, rng);
  return p;
}

inline void check_gcn_shapes(const GcnParams& p, std::size_t features) {
  if (p.w0.rows() != features || p.w1.rows() != p.w0.cols() || p.w1.cols() != 2 ||
      (p.has_skip() && (p.skip_w1.rows() != features || p.skip_w1.cols() != 2)))
    throw ShapeError("gcn: parameter shapes do not match " + std::to_string(features) +
                     " input features");
}

inline DenseMatrix gcn_hidden(const GcnParams& p, const GcnInputs& in) {
  return relu(matmul(in.ax, p.w0));
}

// softmax(A ReLU(A X W0) W1 [+ X skip_W1])
inline GcnCache gcn_forward(const GcnParams& p, const GcnInputs& in) {
  check_gcn_shapes(p, in.x.cols());
  GcnCache c;
  c.hidden = gcn_hidden(p, in);
  c.logits = spmm(in.adjacency, matmul(c.hidden, p.w1));
  if (p.has_skip()) add_inplace(c.logits, matmul(in.x, p.skip_w1));
  c.probs = softmax_rows(c.logits);
  return c;
}

inline LossAndGrads gcn_loss(const GcnParams& p, const GcnInputs& in, std::span<const int> y,
                             std::span<const std::size_t> mask, ClassWeights w) {
  const GcnCache c = gcn_forward(p, in);
  LossAndGrads out;
  out.loss = weighted_cross_entropy(c.probs, y, w, mask).loss;
  const DenseMatrix dz = weighted_cross_entropy_grad(c.probs, y, w, mask);
  const DenseMatrix back = spmm(in.adjacency_t, dz);  // A^T dZ
  DenseMatrix dw1 = matmul_tn(c.hidden, back);
  const DenseMatrix dpre = relu_backward(matmul_nt(back, p.w1), c.hidden);
  out.grads.push_back(matmul_tn(in.ax, dpre));
  out.grads.push_back(std::move(dw1));
  if (p.has_skip()) out.grads.push_back(matmul_tn(in.x, dz));
  return out;
}

// Full-batch training on one propagation problem.
inline GcnParams fit_gcn(GcnParams p, const GcnInputs& in, std::span<const int> y,
                         std::span<const std::size_t> mask, const GcnConfig& cfg,
                         std::vector<double>* trace = nullptr) {
  auto t = adam_train(p.tensors(), cfg.epochs, cfg.learning_rate,
                      [&] { return gcn_loss(p, in, y, mask, cfg.class_weights); });
  if (trace) *trace = std::move(t);
  return p;
}

// Trains on the slices holding the masked nodes; other slices are never read.
inline ModelArtifact train_gcn(const TemporalGraph& g, const DenseMatrix& features,
                               std::span<const std::size_t> train_mask, const GcnConfig& cfg = {}) {
  if (cfg.hidden == 0) throw ConfigError("train_gcn: hidden size must be positive");
  if (train_mask.empty()) throw ConfigError("train_gcn: empty training mask");
  for (std::size_t v : train_mask)
    if (v >= g.node_count()) throw RangeError("train_gcn: mask index out of range");
  require_finite(features, "train_gcn");
  const std::vector<int> steps = steps_of(g, train_mask);
  GraphBatch batch = make_graph_batch(g, features, steps);
  const std::vector<std::size_t> rows = batch.rows_of(train_mask);
  require_two_classes(batch.targets, rows, "train_gcn");
  const GcnInputs in(std::move(batch.adjacency), std::move(batch.features));

  ModelArtifact a;
  a.family = cfg.skip ? ModelFamily::skip_gcn : ModelFamily::gcn;
  a.feature_count = features.cols();
  a.hyperparameters = cfg;
  a.seed = cfg.seed;
  a.params = fit_gcn(init_gcn_params(features.cols(), cfg.hidden, cfg.skip, cfg.seed), in,
                     batch.targets, rows, cfg, &a.loss_trace);
  return a;
}

inline const GcnParams& gcn_params_of(const ModelArtifact& a, const char* who) {
  const auto* p = std::get_if<GcnParams>(&a.params);
  if (!p || (a.family != ModelFamily::gcn && a.family != ModelFamily::skip_gcn))
    throw ConfigError(std::string(who) + ": artifact is not a GCN or Skip-GCN");
  return *p;
}

// Every slice builds its own adjacency and reuses the trained weights.
inline GcnInputs all_steps_inputs(const TemporalGraph& g, const DenseMatrix& features,
                                  GraphBatch& batch) {
  batch = make_graph_batch(g, features, step_range(1, g.max_step()));
  return GcnInputs(batch.adjacency, batch.features);
}

// Hidden layer H1 for every graph node, in graph index order.
inline DenseMatrix extract_embeddings(const ModelArtifact& a, const TemporalGraph& g,
                                      const DenseMatrix& features) {
  const GcnParams& p = gcn_params_of(a, "extract_embeddings");
  check_gcn_shapes(p, features.cols());
  GraphBatch batch;
  const GcnInputs in = all_steps_inputs(g, features, batch);
  DenseMatrix out(g.node_count(), p.w0.cols());
  batch.scatter(gcn_hidden(p, in), out);
  return out;
}

// Pre-softmax output layer for every graph node.
inline DenseMatrix gcn_node_logits(const ModelArtifact& a, const TemporalGraph& g,
                                   const DenseMatrix& features) {
  const GcnParams& p = gcn_params_of(a, "gcn_node_logits");
  GraphBatch batch;
  const GcnInputs in = all_steps_inputs(g, features, batch);
  DenseMatrix out(g.node_count(), 2);
  batch.scatter(gcn_forward(p, in).logits, out);
  return out;
}

inline DenseMatrix gcn_predict_nodes(const GcnParams& p, const TemporalGraph& g,
                                     const DenseMatrix& features) {
  check_gcn_shapes(p, features.cols());
  GraphBatch batch;
  const GcnInputs in = all_steps_inputs(g, features, batch);
  DenseMatrix out(g.node_count(), 2);
  batch.scatter(gcn_forward(p, in).probs, out);
  return out;
}

}  // namespace chronoaml
