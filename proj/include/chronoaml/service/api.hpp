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
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chronoaml/graph/csv_io.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/service/layout.hpp"

namespace chronoaml {

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Order used for class counts and the transfer matrix.
inline constexpr std::array<Label, 3> kClassOrder{Label::illicit, Label::licit, Label::unknown};

inline std::size_t class_slot(Label l) noexcept {
  return l == Label::illicit ? 0 : l == Label::licit ? 1 : 2;
}

// Read-only views over a graph snapshot. Handlers are pure functions of the
// snapshot, so identical requests give byte-identical bodies.
class ApiService {
 public:
  // predictions: one class target per node (0 licit, 1 illicit), or empty.
  ApiService(const TemporalGraph& graph, std::vector<ProjectionLayout> layouts,
             std::vector<int> predictions = {}, nlohmann::json experiments = nlohmann::json::array())
      : graph_(graph), predictions_(std::move(predictions)), experiments_(std::move(experiments)) {
    if (layouts.empty()) throw ConfigError("ApiService: at least one layout is required");
    for (auto& l : layouts) {
      if (l.coords.rows() != graph.node_count() || l.coords.cols() != 2)
        throw ShapeError("ApiService: layout does not match the graph");
      const std::string key = layout_key(l.mode);
      if (default_layout_.empty()) default_layout_ = key;
      layouts_.emplace(key, std::move(l));
    }
    if (!predictions_.empty() && predictions_.size() != graph.node_count())
      throw ShapeError("ApiService: need one prediction per node");
    if (!experiments_.is_array()) throw ConfigError("ApiService: experiments must be a JSON array");
  }

  // Routes GET requests under /api; query holds decoded parameters.
  ApiResponse handle(const std::string& path, const std::map<std::string, std::string>& query) const {
    const auto param = [&](const char* k) -> std::optional<std::string> {
      const auto it = query.find(k);
      if (it == query.end()) return std::nullopt;
      return it->second;
    };
    if (path == "/api/timesteps") return ok(timesteps());
    if (path == "/api/experiments") return ok({{"reports", experiments_}});
    if (path == "/api/search") {
      const auto q = param("q");
      if (!q || q->empty()) return error(400, "bad_request", "search needs a non-empty q parameter");
      return ok(search(*q));
    }
    for (const char* prefix : {"/api/slice/", "/api/stats/"}) {
      const std::string p = prefix;
      if (path.rfind(p, 0) != 0) continue;
      const auto t = csv::parse_number<int>(path.substr(p.size()));
      if (!t || *t < 1 || *t > graph_.max_step())
        return error(404, "unknown_time_step", "no time step '" + path.substr(p.size()) + "'");
      if (p == "/api/stats/") return ok(stats(*t));
      const std::string key = param("layout").value_or(default_layout_);
      const auto it = layouts_.find(key == "raw_features" ? "raw" : key == "gcn_activations" ? "gcn" : key);
      if (it == layouts_.end()) return error(404, "unknown_layout", "layout '" + key + "' is not loaded");
      return ok(slice(*t, it->second));
    }
    if (path.rfind("/api/tx/", 0) == 0) {
      const std::string raw = path.substr(8);
      const auto id = csv::parse_number<TxId>(raw);
      const auto idx = id ? graph_.index_of(*id) : std::nullopt;
      if (!idx) return error(404, "unknown_transaction", "no transaction '" + raw + "'");
      return ok(transaction(*idx));
    }
    return error(404, "not_found", "no endpoint " + path);
  }

  nlohmann::json timesteps() const {
    nlohmann::json steps = nlohmann::json::array();
    for (int t = 1; t <= graph_.max_step(); ++t)
      steps.push_back({{"t", t}, {"nodes", graph_.step_nodes(t).size()}});
    return {{"count", graph_.max_step()}, {"min", 1}, {"max", graph_.max_step()}, {"steps", steps}};
  }

  nlohmann::json slice(int t, const ProjectionLayout& layout) const {
    const auto labels = graph_.labels();
    nlohmann::json nodes = nlohmann::json::array();
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t v : graph_.step_nodes(t)) {
      nodes.push_back({{"txId", graph_.node_id(v)},
                       {"x", layout.coords(v, 0)},
                       {"y", layout.coords(v, 1)},
                       {"label", label_name(labels[v])},
                       {"predicted", predicted(v)},
                       {"degree", graph_.in_neighbors(v).size() + graph_.out_neighbors(v).size()}});
      for (std::size_t w : graph_.out_neighbors(v))
        edges.push_back({{"source", graph_.node_id(v)}, {"target", graph_.node_id(w)}});
    }
    return {{"time_step", t},
            {"layout", layout_key(layout.mode)},
            {"model", layout.model},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
            {"stats", stats(t)}};
  }

  // Class counts plus transfer counts: rows are the source class, columns
  // the target class, both in kClassOrder.
  nlohmann::json stats(int t) const {
    const auto labels = graph_.labels();
    std::array<std::size_t, 3> counts{};
    std::array<std::array<std::size_t, 3>, 3> transfer{};
    std::size_t edges = 0;
    std::array<std::size_t, 2> predicted_counts{};
    for (std::size_t v : graph_.step_nodes(t)) {
      ++counts[class_slot(labels[v])];
      if (!predictions_.empty()) ++predicted_counts[predictions_[v] == 1 ? 0 : 1];
      for (std::size_t w : graph_.out_neighbors(v)) {
        ++transfer[class_slot(labels[v])][class_slot(labels[w])];
        ++edges;
      }
    }
    nlohmann::json names = nlohmann::json::array();
    for (Label l : kClassOrder) names.push_back(label_name(l));
    nlohmann::json out = {
        {"time_step", t},
        {"nodes", counts[0] + counts[1] + counts[2]},
        {"edges", edges},
        {"counts", {{"illicit", counts[0]}, {"licit", counts[1]}, {"unknown", counts[2]}}},
        {"transfer", {{"classes", names}, {"matrix", transfer}}}};
    if (!predictions_.empty())
      out["predicted_counts"] = {{"illicit", predicted_counts[0]}, {"licit", predicted_counts[1]}};
    return out;
  }

  nlohmann::json transaction(std::size_t v) const {
    const auto tag = [&](std::span<const std::size_t> ns) {
      std::vector<TxId> ids;
      for (std::size_t w : ns) ids.push_back(graph_.node_id(w));
      std::sort(ids.begin(), ids.end());
      return ids;
    };
    const std::vector<TxId> in = tag(graph_.in_neighbors(v)), out = tag(graph_.out_neighbors(v));
    std::vector<TxId> both;
    std::set_union(in.begin(), in.end(), out.begin(), out.end(), std::back_inserter(both));
    nlohmann::json coords = nlohmann::json::object();
    for (const auto& [key, l] : layouts_) coords[key] = {l.coords(v, 0), l.coords(v, 1)};
    return {{"txId", graph_.node_id(v)},
            {"time_step", graph_.time_step(v)},
            {"label", label_name(graph_.labels()[v])},
            {"predicted", predicted(v)},
            {"coordinates", coords},
            {"in", in},
            {"out", out},
            {"neighbors", both}};
  }

  // txIds whose decimal form contains q, ascending, at most kSearchLimit.
  static constexpr std::size_t kSearchLimit = 100;

  nlohmann::json search(const std::string& q) const {
    std::vector<TxId> hits;
    for (TxId id : graph_.node_ids())
      if (std::to_string(id).find(q) != std::string::npos) hits.push_back(id);
    std::sort(hits.begin(), hits.end());
    const std::size_t total = hits.size();
    if (hits.size() > kSearchLimit) hits.resize(kSearchLimit);
    return {{"query", q}, {"total", total}, {"truncated", total > kSearchLimit}, {"results", hits}};
  }

  const TemporalGraph& graph() const noexcept { return graph_; }

 private:
  nlohmann::json predicted(std::size_t v) const {
    if (predictions_.empty()) return nullptr;
    return predictions_[v] == 1 ? "illicit" : "licit";
  }

  static ApiResponse ok(const nlohmann::json& j) { return {200, j.dump()}; }

  static ApiResponse error(int status, const char* code, const std::string& message) {
    nlohmann::json j = {{"error", {{"status", status}, {"code", code}, {"message", message}}}};
    return {status, j.dump()};
  }

  const TemporalGraph& graph_;
  std::map<std::string, ProjectionLayout> layouts_;
  std::string default_layout_;
  std::vector<int> predictions_;
  nlohmann::json experiments_;
};

}  // namespace chronoaml
