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
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "chronoaml/core/rng.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/models/gcn.hpp"
#include "chronoaml/models/graph_batch.hpp"
#include "chronoaml/models/params.hpp"
#include "chronoaml/models/training.hpp"
#include "chronoaml/numerics/ops.hpp"

namespace chronoaml {

namespace detail {

template <typename Fn>
DenseMatrix map_values(const DenseMatrix& m, Fn fn) {
  DenseMatrix out(m.rows(), m.cols());
  auto src = m.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
  return out;
}

inline double sigmoid(double v) noexcept { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace detail

inline GruParams init_gru_params(std::size_t rows, std::size_t k, RngStream& rng) {
  GruParams p;
  for (auto [input, hidden, bias] : {std::tuple{&p.update_input, &p.update_hidden, &p.update_bias},
                                     std::tuple{&p.reset_input, &p.reset_hidden, &p.reset_bias},
                                     std::tuple{&p.candidate_input, &p.candidate_hidden,
                                                &p.candidate_bias}}) {
    *input = glorot_uniform(rows, rows, rng);
    *hidden = glorot_uniform(rows, rows, rng);
    *bias = DenseMatrix(rows, k);
  }
  return p;
}

struct GruCache {
  DenseMatrix input;
  DenseMatrix hidden;
  DenseMatrix update;
  DenseMatrix reset;
  DenseMatrix candidate;
  DenseMatrix output;
};

// Z = s(Wz X + Uz H + Bz), R = s(Wr X + Ur H + Br),
// C = tanh(Wc X + Uc (R.H) + Bc), H' = (1 - Z).H + Z.C
inline GruCache gru_forward(const GruParams& p, const DenseMatrix& x, const DenseMatrix& h) {
  require_same_shape(x, h, "gru_forward");
  require_same_shape(h, p.update_bias, "gru_forward");
  GruCache c;
  c.input = x;
  c.hidden = h;
  const auto gate = [&](const DenseMatrix& wx, const DenseMatrix& uh, const DenseMatrix& b,
                        const DenseMatrix& state, double (*fn)(double)) {
    DenseMatrix pre = matmul(wx, x);
    add_inplace(pre, matmul(uh, state));
    add_inplace(pre, b);
    return detail::map_values(pre, fn);
  };
  c.update = gate(p.update_input, p.update_hidden, p.update_bias, h, detail::sigmoid);
  c.reset = gate(p.reset_input, p.reset_hidden, p.reset_bias, h, detail::sigmoid);
  c.candidate = gate(p.candidate_input, p.candidate_hidden, p.candidate_bias,
                     hadamard(c.reset, h), [](double v) { return std::tanh(v); });
  c.output = DenseMatrix(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double z = c.update.values()[i];
    c.output.values()[i] = (1.0 - z) * h.values()[i] + z * c.candidate.values()[i];
  }
  return c;
}

struct GruInputGrads {
  DenseMatrix input;
  DenseMatrix hidden;
};

// Accumulates parameter gradients into grads.
inline GruInputGrads gru_backward(const GruParams& p, const GruCache& c, const DenseMatrix& d_out,
                                  GruParams& grads) {
  const std::size_t n = d_out.size();
  const auto h = c.hidden.values();
  const auto z = c.update.values();
  const auto r = c.reset.values();
  const auto cand = c.candidate.values();
  const auto g = d_out.values();
  DenseMatrix d_update_pre(d_out.rows(), d_out.cols());
  DenseMatrix d_cand_pre(d_out.rows(), d_out.cols());
  GruInputGrads out{DenseMatrix(d_out.rows(), d_out.cols()), DenseMatrix(d_out.rows(), d_out.cols())};
  for (std::size_t i = 0; i < n; ++i) {
    d_update_pre.values()[i] = g[i] * (cand[i] - h[i]) * z[i] * (1.0 - z[i]);
    d_cand_pre.values()[i] = g[i] * z[i] * (1.0 - cand[i] * cand[i]);
    out.hidden.values()[i] = g[i] * (1.0 - z[i]);
  }
  const DenseMatrix reset_hidden = hadamard(c.reset, c.hidden);
  add_inplace(grads.candidate_input, matmul_nt(d_cand_pre, c.input));
  add_inplace(grads.candidate_hidden, matmul_nt(d_cand_pre, reset_hidden));
  add_inplace(grads.candidate_bias, d_cand_pre);
  add_inplace(out.input, matmul_tn(p.candidate_input, d_cand_pre));
  const DenseMatrix d_reset_hidden = matmul_tn(p.candidate_hidden, d_cand_pre);

  DenseMatrix d_reset_pre(d_out.rows(), d_out.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const double drh = d_reset_hidden.values()[i];
    d_reset_pre.values()[i] = drh * h[i] * r[i] * (1.0 - r[i]);
    out.hidden.values()[i] += drh * r[i];
  }
  for (auto [pre, wx, uh, bias, gwx, guh, gb] :
       {std::tuple{&d_reset_pre, &p.reset_input, &p.reset_hidden, &p.reset_bias, &grads.reset_input,
                   &grads.reset_hidden, &grads.reset_bias},
        std::tuple{&d_update_pre, &p.update_input, &p.update_hidden, &p.update_bias,
                   &grads.update_input, &grads.update_hidden, &grads.update_bias}}) {
    (void)bias;
    add_inplace(*gwx, matmul_nt(*pre, c.input));
    add_inplace(*guh, matmul_nt(*pre, c.hidden));
    add_inplace(*gb, *pre);
    add_inplace(out.input, matmul_tn(*wx, *pre));
    add_inplace(out.hidden, matmul_tn(*uh, *pre));
  }
  return out;
}

struct TopkCache {
  std::vector<std::size_t> rows;  // selected rows, best first
  std::vector<double> scores;     // y = M p / |p| for every row
  double norm = 1.0;
  DenseMatrix summary;            // cols(M) x k
};

// Column j of the summary is row rows[j] of M scaled by tanh(y); columns past
// the row count stay zero. Ties in y go to the lower row index.
inline TopkCache topk_summary(const DenseMatrix& m, const DenseMatrix& p, std::size_t k) {
  if (p.rows() != m.cols() || p.cols() != 1) throw ShapeError("topk_summary: scoring vector shape");
  TopkCache c;
  double sq = 0.0;
  for (double v : p.values()) sq += v * v;
  c.norm = sq > 0.0 ? std::sqrt(sq) : 1.0;
  c.scores.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    const auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * p(j, 0);
    c.scores[i] = s / c.norm;
  }
  std::vector<std::size_t> order(m.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return c.scores[a] > c.scores[b] || (c.scores[a] == c.scores[b] && a < b);
                    });
  c.rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  c.summary = DenseMatrix(m.cols(), k);
  for (std::size_t j = 0; j < take; ++j) {
    const double gate = std::tanh(c.scores[c.rows[j]]);
    const auto row = m.row(c.rows[j]);
    for (std::size_t f = 0; f < row.size(); ++f) c.summary(f, j) = row[f] * gate;
  }
  return c;
}

// Gradient through a fixed selection. d_m may be null when M is constant.
inline void topk_backward(const DenseMatrix& m, const DenseMatrix& p, const TopkCache& c,
                          const DenseMatrix& d_summary, DenseMatrix* d_m, DenseMatrix& d_p) {
  for (std::size_t j = 0; j < c.rows.size(); ++j) {
    const std::size_t i = c.rows[j];
    const double y = c.scores[i];
    const double gate = std::tanh(y);
    const auto row = m.row(i);
    double d_gate = 0.0;
    for (std::size_t f = 0; f < row.size(); ++f) d_gate += d_summary(f, j) * row[f];
    const double dy = d_gate * (1.0 - gate * gate);
    if (d_m)
      for (std::size_t f = 0; f < row.size(); ++f)
        (*d_m)(i, f) += d_summary(f, j) * gate + dy * p(f, 0) / c.norm;
    for (std::size_t f = 0; f < row.size(); ++f)
      d_p(f, 0) += dy * (row[f] / c.norm - y * p(f, 0) / (c.norm * c.norm));
  }
}

inline EvolveParams init_evolve_params(std::size_t features, std::size_t hidden,
                                       std::uint64_t seed) {
  RngStream rng = RngStream(seed).derive(0x40);
  EvolveParams p;
  p.w0_init = glorot_uniform(features, hidden, rng);
  p.w1_init = glorot_uniform(hidden, 2, rng);
  p.gru0 = init_gru_params(features, hidden, rng);
  p.gru1 = init_gru_params(hidden, 2, rng);
  p.score0 = glorot_uniform(features, 1, rng);
  p.score1 = glorot_uniform(hidden, 1, rng);
  return p;
}

// One time step: its own propagation inputs plus the labeled rows that
// contribute to the loss.
struct EvolveStep {
  GcnInputs inputs;
  std::vector<int> targets;
  std::vector<std::size_t> mask;
};

struct EvolveStepCache {
  TopkCache summary0;
  GruCache gru0;
  DenseMatrix hidden;
  TopkCache summary1;
  GruCache gru1;
  DenseMatrix probs;
};

// Runs the steps in order; the evolved weights of step t are gru0/gru1.output.
inline std::vector<EvolveStepCache> evolve_forward(const EvolveParams& p,
                                                   std::span<const EvolveStep> steps) {
  if (p.w0_init.rows() != p.score0.rows() || p.w1_init.rows() != p.w0_init.cols())
    throw ShapeError("evolvegcn: inconsistent parameter shapes");
  std::vector<EvolveStepCache> caches;
  caches.reserve(steps.size());
  const DenseMatrix* w0 = &p.w0_init;
  const DenseMatrix* w1 = &p.w1_init;
  for (const auto& s : steps) {
    if (s.inputs.x.cols() != p.w0_init.rows())
      throw ShapeError("evolvegcn: feature count does not match the model");
    EvolveStepCache c;
    c.summary0 = topk_summary(s.inputs.x, p.score0, w0->cols());
    c.gru0 = gru_forward(p.gru0, c.summary0.summary, *w0);
    c.hidden = relu(matmul(s.inputs.ax, c.gru0.output));
    c.summary1 = topk_summary(c.hidden, p.score1, w1->cols());
    c.gru1 = gru_forward(p.gru1, c.summary1.summary, *w1);
    c.probs = softmax_rows(spmm(s.inputs.adjacency, matmul(c.hidden, c.gru1.output)));
    caches.push_back(std::move(c));
    w0 = &caches.back().gru0.output;
    w1 = &caches.back().gru1.output;
  }
  return caches;
}

// Mean weighted cross entropy over all masked rows of all steps, with
// gradients by backpropagation through time.
inline LossAndGrads evolve_loss(const EvolveParams& p, std::span<const EvolveStep> steps,
                                ClassWeights w) {
  std::size_t total = 0;
  for (const auto& s : steps) total += s.mask.size();
  if (total == 0) throw ConfigError("evolvegcn: empty training mask");
  const std::vector<EvolveStepCache> caches = evolve_forward(p, steps);

  LossAndGrads out;
  GruParams g0 = GruParams::zeros_like(p.gru0);
  GruParams g1 = GruParams::zeros_like(p.gru1);
  DenseMatrix d_score0(p.score0.rows(), 1), d_score1(p.score1.rows(), 1);
  DenseMatrix carry0(p.w0_init.rows(), p.w0_init.cols());
  DenseMatrix carry1(p.w1_init.rows(), p.w1_init.cols());
  for (std::size_t k = steps.size(); k-- > 0;) {
    const EvolveStep& s = steps[k];
    const EvolveStepCache& c = caches[k];
    DenseMatrix d_w1 = carry1;
    DenseMatrix d_hidden(c.hidden.rows(), c.hidden.cols());
    if (!s.mask.empty()) {
      const double share = static_cast<double>(s.mask.size()) / static_cast<double>(total);
      out.loss += share * weighted_cross_entropy(c.probs, s.targets, w, s.mask).loss;
      DenseMatrix dz = weighted_cross_entropy_grad(c.probs, s.targets, w, s.mask);
      for (double& v : dz.values()) v *= share;
      const DenseMatrix back = spmm(s.inputs.adjacency_t, dz);
      add_inplace(d_w1, matmul_tn(c.hidden, back));
      d_hidden = matmul_nt(back, c.gru1.output);
    }
    const GruInputGrads b1 = gru_backward(p.gru1, c.gru1, d_w1, g1);
    carry1 = b1.hidden;
    topk_backward(c.hidden, p.score1, c.summary1, b1.input, &d_hidden, d_score1);

    DenseMatrix d_w0 = carry0;
    add_inplace(d_w0, matmul_tn(s.inputs.ax, relu_backward(d_hidden, c.hidden)));
    const GruInputGrads b0 = gru_backward(p.gru0, c.gru0, d_w0, g0);
    carry0 = b0.hidden;
    topk_backward(s.inputs.x, p.score0, c.summary0, b0.input, nullptr, d_score0);
  }
  out.grads.push_back(std::move(carry0));
  out.grads.push_back(std::move(carry1));
  for (auto* t : g0.tensors()) out.grads.push_back(std::move(*t));
  for (auto* t : g1.tensors()) out.grads.push_back(std::move(*t));
  out.grads.push_back(std::move(d_score0));
  out.grads.push_back(std::move(d_score1));
  return out;
}

// Steps first..last, each read once through the graph's slice accessor.
inline std::vector<EvolveStep> evolve_steps(const TemporalGraph& g, const DenseMatrix& features,
                                            int first, int last,
                                            std::span<const std::size_t> mask = {}) {
  std::vector<EvolveStep> steps;
  std::vector<std::size_t> sorted_mask(mask.begin(), mask.end());
  std::sort(sorted_mask.begin(), sorted_mask.end());
  for (int t = first; t <= last; ++t) {
    const int one[] = {t};
    GraphBatch b = make_graph_batch(g, features, one);
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < b.nodes.size(); ++r)
      if (std::binary_search(sorted_mask.begin(), sorted_mask.end(), b.nodes[r])) rows.push_back(r);
    steps.push_back({GcnInputs(std::move(b.adjacency), std::move(b.features)),
                     std::move(b.targets), std::move(rows)});
  }
  return steps;
}

// Weights evolve from step 1 through the last step holding masked nodes;
// later steps are never read.
inline ModelArtifact train_evolvegcn(const TemporalGraph& g, const DenseMatrix& features,
                                     std::span<const std::size_t> train_mask,
                                     const EvolveConfig& cfg = {}) {
  if (cfg.hidden == 0) throw ConfigError("train_evolvegcn: hidden size must be positive");
  if (train_mask.empty()) throw ConfigError("train_evolvegcn: empty training mask");
  if (features.rows() != g.node_count()) throw ShapeError("train_evolvegcn: feature rows");
  require_finite(features, "train_evolvegcn");
  int last = 0;
  for (std::size_t v : train_mask) {
    if (v >= g.node_count()) throw RangeError("train_evolvegcn: mask index out of range");
    last = std::max(last, g.time_step(v));
  }
  const std::vector<EvolveStep> steps = evolve_steps(g, features, 1, last, train_mask);
  std::vector<int> targets;
  std::vector<std::size_t> rows;
  for (const auto& s : steps)
    for (std::size_t r : s.mask) {
      rows.push_back(targets.size());
      targets.push_back(s.targets[r]);
    }
  require_two_classes(targets, rows, "train_evolvegcn");
  if (rows.size() != train_mask.size())
    throw ConfigError("train_evolvegcn: training mask contains duplicate nodes");

  EvolveParams p = init_evolve_params(features.cols(), cfg.hidden, cfg.seed);
  ModelArtifact a;
  a.family = ModelFamily::evolve_gcn;
  a.feature_count = features.cols();
  a.hyperparameters = cfg;
  a.seed = cfg.seed;
  a.loss_trace = adam_train(p.tensors(), cfg.epochs, cfg.learning_rate,
                            [&] { return evolve_loss(p, steps, cfg.class_weights); });
  a.params = std::move(p);
  return a;
}

// Evolves the weights through every step in order and predicts each slice
// with its own step's weights.
inline DenseMatrix evolve_predict_nodes(const EvolveParams& p, const TemporalGraph& g,
                                        const DenseMatrix& features) {
  if (features.cols() != p.w0_init.rows())
    throw ShapeError("evolvegcn: feature count does not match the model");
  const std::vector<EvolveStep> steps = evolve_steps(g, features, 1, g.max_step());
  const std::vector<EvolveStepCache> caches = evolve_forward(p, steps);
  DenseMatrix out(g.node_count(), 2);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto nodes = g.step_nodes(static_cast<int>(k) + 1);
    for (std::size_t r = 0; r < nodes.size(); ++r)
      for (std::size_t c = 0; c < 2; ++c) out(nodes[r], c) = caches[k].probs(r, c);
  }
  return out;
}

}  // namespace chronoaml
