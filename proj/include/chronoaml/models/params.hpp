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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chronoaml/core/error.hpp"
#include "chronoaml/numerics/dense.hpp"
#include "chronoaml/numerics/ops.hpp"

namespace chronoaml {

enum class ModelFamily { logreg, mlp, random_forest, gcn, skip_gcn, evolve_gcn };

// Short tag used in file names, CLI flags and artifacts.
inline const char* family_tag(ModelFamily f) noexcept {
  switch (f) {
    case ModelFamily::logreg: return "lr";
    case ModelFamily::mlp: return "mlp";
    case ModelFamily::random_forest: return "rf";
    case ModelFamily::gcn: return "gcn";
    case ModelFamily::skip_gcn: return "skipgcn";
    default: return "evolvegcn";
  }
}

// Method name as printed in result tables.
inline const char* family_display_name(ModelFamily f) noexcept {
  switch (f) {
    case ModelFamily::logreg: return "Logistic Regr";
    case ModelFamily::mlp: return "MLP";
    case ModelFamily::random_forest: return "RandomForest";
    case ModelFamily::gcn: return "GCN";
    case ModelFamily::skip_gcn: return "Skip-GCN";
    default: return "EvolveGCN";
  }
}

inline ModelFamily parse_family(const std::string& tag) {
  for (auto f : {ModelFamily::logreg, ModelFamily::mlp, ModelFamily::random_forest, ModelFamily::gcn,
                 ModelFamily::skip_gcn, ModelFamily::evolve_gcn})
    if (tag == family_tag(f)) return f;
  throw ConfigError("unknown model family '" + tag + "'");
}

inline bool is_graph_family(ModelFamily f) noexcept {
  return f == ModelFamily::gcn || f == ModelFamily::skip_gcn || f == ModelFamily::evolve_gcn;
}

inline void to_json(nlohmann::json& j, const ClassWeights& w) { j = {w.licit, w.illicit}; }
inline void from_json(const nlohmann::json& j, ClassWeights& w) {
  w.licit = j.at(0).get<double>();
  w.illicit = j.at(1).get<double>();
}

struct LogRegConfig {
  std::size_t epochs = 1000;
  double learning_rate = 0.01;
  double l2 = 1e-4;
  ClassWeights class_weights{0.3, 0.7};
  std::uint64_t seed = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LogRegConfig, epochs, learning_rate, l2, class_weights, seed)

struct MlpConfig {
  std::size_t hidden = 50;
  std::size_t epochs = 200;
  double learning_rate = 0.001;
  ClassWeights class_weights{0.3, 0.7};
  std::uint64_t seed = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MlpConfig, hidden, epochs, learning_rate, class_weights, seed)

struct ForestConfig {
  std::size_t estimators = 50;
  std::size_t max_features = 50;
  bool bootstrap = true;
  bool class_weighted = true;
  ClassWeights class_weights{0.3, 0.7};
  std::uint64_t seed = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ForestConfig, estimators, max_features, bootstrap, class_weighted,
                                   class_weights, seed)

struct GcnConfig {
  std::size_t hidden = 100;
  std::size_t epochs = 1000;
  double learning_rate = 0.001;
  ClassWeights class_weights{0.3, 0.7};
  bool skip = false;
  std::uint64_t seed = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GcnConfig, hidden, epochs, learning_rate, class_weights, skip, seed)

struct EvolveConfig {
  std::size_t hidden = 100;
  std::size_t epochs = 1000;
  double learning_rate = 0.001;
  ClassWeights class_weights{0.3, 0.7};
  std::uint64_t seed = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvolveConfig, hidden, epochs, learning_rate, class_weights, seed)

struct LogRegParams {
  DenseMatrix weights;  // F x 2
  DenseMatrix bias;     // 1 x 2

  std::vector<DenseMatrix*> tensors() { return {&weights, &bias}; }
};

struct MlpParams {
  DenseMatrix hidden_weights;  // F x h
  DenseMatrix hidden_bias;     // 1 x h
  DenseMatrix output_weights;  // h x 2
  DenseMatrix output_bias;     // 1 x 2

  std::vector<DenseMatrix*> tensors() {
    return {&hidden_weights, &hidden_bias, &output_weights, &output_bias};
  }
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<double, 2> distribution{0.0, 0.0};  // class histogram, sums to 1

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  bool operator==(const DecisionTree&) const = default;
};

struct ForestParams {
  std::vector<DecisionTree> trees;
};

struct GcnParams {
  DenseMatrix w0;       // F x d
  DenseMatrix w1;       // d x 2
  DenseMatrix skip_w1;  // F x 2, empty unless Skip-GCN

  bool has_skip() const noexcept { return !skip_w1.empty(); }
  std::vector<DenseMatrix*> tensors() {
    if (has_skip()) return {&w0, &w1, &skip_w1};
    return {&w0, &w1};
  }
};

// Matrix GRU. Inputs and hidden state are (rows x k); input/hidden weights
// are (rows x rows) and biases (rows x k).
struct GruParams {
  DenseMatrix update_input, update_hidden, update_bias;
  DenseMatrix reset_input, reset_hidden, reset_bias;
  DenseMatrix candidate_input, candidate_hidden, candidate_bias;

  std::vector<DenseMatrix*> tensors() {
    return {&update_input, &update_hidden, &update_bias, &reset_input, &reset_hidden,
            &reset_bias, &candidate_input, &candidate_hidden, &candidate_bias};
  }
  static GruParams zeros_like(const GruParams& p) {
    const auto z = [](const DenseMatrix& m) { return DenseMatrix(m.rows(), m.cols()); };
    return {z(p.update_input),    z(p.update_hidden),    z(p.update_bias),
            z(p.reset_input),     z(p.reset_hidden),     z(p.reset_bias),
            z(p.candidate_input), z(p.candidate_hidden), z(p.candidate_bias)};
  }
};

// GCN weights evolved by one GRU per layer; the initial weights are the
// GRU's starting hidden state.
struct EvolveParams {
  DenseMatrix w0_init;  // F x d
  DenseMatrix w1_init;  // d x 2
  GruParams gru0;
  GruParams gru1;
  DenseMatrix score0;  // F x 1, top-k scoring vector for the input layer
  DenseMatrix score1;  // d x 1, for the hidden layer

  std::vector<DenseMatrix*> tensors() {
    std::vector<DenseMatrix*> t{&w0_init, &w1_init};
    for (auto* p : gru0.tensors()) t.push_back(p);
    for (auto* p : gru1.tensors()) t.push_back(p);
    t.push_back(&score0);
    t.push_back(&score1);
    return t;
  }
};

using ModelParams = std::variant<LogRegParams, MlpParams, ForestParams, GcnParams, EvolveParams>;

struct ModelArtifact {
  ModelFamily family = ModelFamily::logreg;
  std::size_t feature_count = 0;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<double> loss_trace;
  ModelParams params;
};

struct LossAndGrads {
  double loss = 0.0;
  std::vector<DenseMatrix> grads;  // same order as the params' tensors()
};

inline void require_two_classes(std::span<const int> targets, std::span<const std::size_t> mask,
                                const char* who) {
  if (mask.empty()) throw ConfigError(std::string(who) + ": empty training mask");
  bool seen[2] = {false, false};
  for (std::size_t i : mask) {
    if (i >= targets.size()) throw RangeError(std::string(who) + ": mask index out of range");
    const int y = targets[i];
    if (y != 0 && y != 1) throw ConfigError(std::string(who) + ": mask contains an unlabeled row");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) throw ConfigError(std::string(who) + ": training mask has a single class");
}

}  // namespace chronoaml
