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
#include <fstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chronoaml/core/error.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/models/evolvegcn.hpp"
#include "chronoaml/models/forest.hpp"
#include "chronoaml/models/gcn.hpp"
#include "chronoaml/models/logreg.hpp"
#include "chronoaml/models/mlp.hpp"
#include "chronoaml/models/params.hpp"

namespace chronoaml {

inline constexpr int kArtifactVersion = 1;

namespace detail {

using nlohmann::json;

inline json tensor_json(const DenseMatrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.storage()}};
}

inline DenseMatrix tensor_from(const json& j) {
  return DenseMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                     j.at("data").get<std::vector<double>>());
}

inline json tensors_json(std::vector<DenseMatrix*> ts) {
  json out = json::array();
  for (const DenseMatrix* t : ts) out.push_back(tensor_json(*t));
  return out;
}

inline void tensors_from(const json& j, std::vector<DenseMatrix*> ts) {
  if (!j.is_array() || j.size() != ts.size())
    throw ConfigError("artifact: expected " + std::to_string(ts.size()) + " tensors");
  for (std::size_t k = 0; k < ts.size(); ++k) *ts[k] = tensor_from(j[k]);
}

inline json forest_json(const ForestParams& f) {
  json trees = json::array();
  for (const auto& t : f.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.distribution[0], n.distribution[1]});
    trees.push_back(std::move(nodes));
  }
  return trees;
}

inline ForestParams forest_from(const json& j) {
  ForestParams f;
  for (const auto& tj : j) {
    DecisionTree t;
    for (const auto& nj : tj) {
      TreeNode n;
      n.feature = nj.at(0).get<std::int32_t>();
      n.threshold = nj.at(1).get<double>();
      n.left = nj.at(2).get<std::int32_t>();
      n.right = nj.at(3).get<std::int32_t>();
      n.distribution = {nj.at(4).get<double>(), nj.at(5).get<double>()};
      t.nodes.push_back(n);
    }
    for (const auto& n : t.nodes)
      if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 ||
                           static_cast<std::size_t>(std::max(n.left, n.right)) >= t.nodes.size()))
        throw ConfigError("artifact: tree node has an invalid child");
    if (t.nodes.empty()) throw ConfigError("artifact: empty tree");
    f.trees.push_back(std::move(t));
  }
  return f;
}

}  // namespace detail

// Doubles are written in shortest round-trip form, so reloading is bit-exact.
inline nlohmann::json artifact_to_json(const ModelArtifact& a) {
  nlohmann::json params = std::visit(
      [](const auto& p) -> nlohmann::json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ForestParams>)
          return detail::forest_json(p);
        else
          return detail::tensors_json(const_cast<T&>(p).tensors());
      },
      a.params);
  return {{"format", "chronoaml-model"},
          {"version", kArtifactVersion},
          {"family", family_tag(a.family)},
          {"feature_count", a.feature_count},
          {"seed", a.seed},
          {"hyperparameters", a.hyperparameters},
          {"loss_trace", a.loss_trace},
          {"params", std::move(params)}};
}

inline ModelArtifact artifact_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "chronoaml-model") throw ConfigError("artifact: unknown format");
    if (j.at("version").get<int>() != kArtifactVersion)
      throw ConfigError("artifact: unsupported version " + j.at("version").dump());
    ModelArtifact a;
    a.family = parse_family(j.at("family").get<std::string>());
    a.feature_count = j.at("feature_count").get<std::size_t>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.hyperparameters = j.at("hyperparameters");
    a.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    const auto& pj = j.at("params");
    switch (a.family) {
      case ModelFamily::logreg: {
        LogRegParams p;
        detail::tensors_from(pj, p.tensors());
        a.params = std::move(p);
        break;
      }
      case ModelFamily::mlp: {
        MlpParams p;
        detail::tensors_from(pj, p.tensors());
        a.params = std::move(p);
        break;
      }
      case ModelFamily::random_forest:
        a.params = detail::forest_from(pj);
        break;
      case ModelFamily::gcn:
      case ModelFamily::skip_gcn: {
        GcnParams p;
        if (pj.size() == 3) p.skip_w1 = DenseMatrix(1, 1);  // so tensors() lists three
        detail::tensors_from(pj, p.tensors());
        if ((a.family == ModelFamily::skip_gcn) != p.has_skip())
          throw ConfigError("artifact: skip weights do not match the family");
        a.params = std::move(p);
        break;
      }
      case ModelFamily::evolve_gcn: {
        EvolveParams p;
        detail::tensors_from(pj, p.tensors());
        a.params = std::move(p);
        break;
      }
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("artifact: malformed JSON: ") + e.what());
  }
}

inline void save_artifact(const ModelArtifact& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << artifact_to_json(a).dump() << '\n';
  if (!out) throw Error("write failed: " + path);
}

inline ModelArtifact load_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return artifact_from_json(j);
}

// Per-row class probabilities. Graph families need the graph and return one
// row per graph node; the others accept any rows.
inline DenseMatrix predict(const ModelArtifact& a, const DenseMatrix& features,
                           const TemporalGraph* graph = nullptr) {
  if (features.cols() != a.feature_count)
    throw ShapeError("predict: features have " + std::to_string(features.cols()) +
                     " columns, model expects " + std::to_string(a.feature_count));
  if (is_graph_family(a.family) && !graph)
    throw ConfigError(std::string("predict: ") + family_tag(a.family) + " needs the graph");
  return std::visit(
      [&](const auto& p) -> DenseMatrix {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LogRegParams>)
          return logreg_forward(p, features);
        else if constexpr (std::is_same_v<T, MlpParams>)
          return mlp_forward(p, features);
        else if constexpr (std::is_same_v<T, ForestParams>)
          return forest_predict(p, features);
        else if constexpr (std::is_same_v<T, GcnParams>)
          return gcn_predict_nodes(p, *graph, features);
        else
          return evolve_predict_nodes(p, *graph, features);
      },
      a.params);
}

// argmax; an exact tie goes to licit.
inline int predicted_class(std::span<const double> probs) noexcept {
  return probs[1] > probs[0] ? 1 : 0;
}

inline std::vector<int> predicted_classes(const DenseMatrix& probs) {
  std::vector<int> out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) out[i] = predicted_class(probs.row(i));
  return out;
}

}  // namespace chronoaml
