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
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/numerics/dense.hpp"

namespace chronoaml {

// Integer values double as class targets: licit = 0, illicit = 1.
enum class Label : std::int8_t { unknown = -1, licit = 0, illicit = 1 };

inline int target_of(Label l) noexcept { return static_cast<int>(l); }
inline bool is_labeled(Label l) noexcept { return l != Label::unknown; }

inline const char* label_name(Label l) noexcept {
  switch (l) {
    case Label::illicit: return "illicit";
    case Label::licit: return "licit";
    default: return "unknown";
  }
}

using TxId = std::int64_t;

struct NodeTable {
  std::vector<TxId> node_ids;
  std::vector<int> time_steps;
  DenseMatrix features;  // rows = nodes; column 0 is the time step
  std::size_t local_count = 94;
  std::size_t total_count = 166;
};

struct EdgeList {
  std::vector<std::pair<TxId, TxId>> edges;
};

struct LabelMap {
  std::vector<std::pair<TxId, Label>> entries;
};

struct GraphBuildOptions {
  // Reject edges whose endpoints sit in different time steps.
  bool require_time_locality = true;
};

// One time step: the induced subgraph over the step's nodes.
struct GraphSlice {
  int time_step = 0;
  std::vector<std::size_t> nodes;                         // global indices, ascending
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // local indices into nodes
  std::vector<Label> labels;
  DenseMatrix features;
};

// Immutable directed transaction graph sliced by time step. Per-step access
// counters record which steps were read through slice(), label() and
// feature_row(); they are instrumentation only and never affect results.
class TemporalGraph {
 public:
  TemporalGraph() = default;
  TemporalGraph(const TemporalGraph&) = delete;
  TemporalGraph& operator=(const TemporalGraph&) = delete;
  TemporalGraph(TemporalGraph&&) noexcept = default;
  TemporalGraph& operator=(TemporalGraph&&) noexcept = default;

  static TemporalGraph build(NodeTable nodes, const EdgeList& edges, const LabelMap& labels,
                             GraphBuildOptions opts = {}) {
    TemporalGraph g;
    const std::size_t n = nodes.node_ids.size();
    if (nodes.time_steps.size() != n || nodes.features.rows() != n)
      throw ShapeError("TemporalGraph: node table columns have different lengths");
    if (nodes.features.cols() != nodes.total_count)
      throw ShapeError("TemporalGraph: feature width differs from total_count");
    if (nodes.local_count > nodes.total_count)
      throw ConfigError("TemporalGraph: local_count exceeds total_count");

    g.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!g.index_.emplace(nodes.node_ids[i], i).second)
        throw IntegrityError("duplicate txId " + std::to_string(nodes.node_ids[i]));
      if (nodes.time_steps[i] < 1)
        throw RangeError("txId " + std::to_string(nodes.node_ids[i]) + " has time step < 1");
    }

    g.labels_.assign(n, Label::unknown);
    std::vector<bool> seen(n, false);
    for (const auto& [id, label] : labels.entries) {
      const auto it = g.index_.find(id);
      if (it == g.index_.end())
        throw IntegrityError("label for txId " + std::to_string(id) + " not in features");
      if (seen[it->second]) throw IntegrityError("duplicate label for txId " + std::to_string(id));
      seen[it->second] = true;
      g.labels_[it->second] = label;
    }

    std::vector<std::pair<std::size_t, std::size_t>> resolved;
    resolved.reserve(edges.edges.size());
    for (const auto& [src, dst] : edges.edges) {
      const auto s = g.index_.find(src);
      const auto d = g.index_.find(dst);
      if (s == g.index_.end() || d == g.index_.end())
        throw IntegrityError("edge (" + std::to_string(src) + ", " + std::to_string(dst) +
                             ") references a txId missing from the features file");
      if (s->second == d->second)
        throw IntegrityError("self-loop on txId " + std::to_string(src));
      if (opts.require_time_locality &&
          nodes.time_steps[s->second] != nodes.time_steps[d->second])
        throw IntegrityError("edge (" + std::to_string(src) + ", " + std::to_string(dst) +
                             ") connects different time steps");
      resolved.emplace_back(s->second, d->second);
    }
    // Collapse duplicates, keeping first-appearance order.
    {
      std::vector<std::size_t> order(resolved.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return resolved[a] < resolved[b]; });
      std::vector<bool> keep(resolved.size(), true);
      std::size_t dup = 0;
      for (std::size_t k = 1; k < order.size(); ++k)
        if (resolved[order[k]] == resolved[order[k - 1]]) {
          keep[order[k]] = false;
          ++dup;
        }
      if (dup > 0) {
        g.warnings_.push_back("collapsed " + std::to_string(dup) + " duplicate edge(s)");
        std::vector<std::pair<std::size_t, std::size_t>> kept;
        kept.reserve(resolved.size() - dup);
        for (std::size_t k = 0; k < resolved.size(); ++k)
          if (keep[k]) kept.push_back(resolved[k]);
        resolved = std::move(kept);
      }
    }
    g.edges_ = std::move(resolved);
    g.out_ = Adjacency::build(n, g.edges_, false);
    g.in_ = Adjacency::build(n, g.edges_, true);

    int max_step = 0;
    for (int t : nodes.time_steps) max_step = std::max(max_step, t);
    g.slices_.assign(static_cast<std::size_t>(max_step), {});
    for (std::size_t i = 0; i < n; ++i)
      g.slices_[static_cast<std::size_t>(nodes.time_steps[i] - 1)].push_back(i);
    g.counters_ = std::make_unique<std::atomic<std::uint64_t>[]>(g.slices_.size() + 1);
    g.nodes_ = std::move(nodes);
    return g;
  }

  std::size_t node_count() const noexcept { return nodes_.node_ids.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  // Largest time step T; steps are numbered 1..T.
  int max_step() const noexcept { return static_cast<int>(slices_.size()); }
  std::size_t time_step_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(slices_.begin(), slices_.end(),
                                                  [](const auto& s) { return !s.empty(); }));
  }
  std::size_t local_count() const noexcept { return nodes_.local_count; }
  std::size_t total_count() const noexcept { return nodes_.total_count; }

  TxId node_id(std::size_t i) const { return nodes_.node_ids.at(i); }
  std::span<const TxId> node_ids() const noexcept { return nodes_.node_ids; }
  std::optional<std::size_t> index_of(TxId id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int time_step(std::size_t i) const { return nodes_.time_steps.at(i); }

  Label label(std::size_t i) const {
    record(nodes_.time_steps.at(i));
    return labels_[i];
  }
  std::span<const double> feature_row(std::size_t i) const {
    record(nodes_.time_steps.at(i));
    return nodes_.features.row(i);
  }

  // Whole-table views, not access-counted. Training code goes through
  // slice() instead.
  const NodeTable& node_table() const noexcept { return nodes_; }
  const DenseMatrix& features() const noexcept { return nodes_.features; }
  std::span<const Label> labels() const noexcept { return labels_; }

  std::span<const std::size_t> out_neighbors(std::size_t i) const { return out_.of(i); }
  std::span<const std::size_t> in_neighbors(std::size_t i) const { return in_.of(i); }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }

  std::span<const std::size_t> step_nodes(int t) const {
    check_step(t);
    return slices_[static_cast<std::size_t>(t - 1)];
  }

  GraphSlice slice(int t) const {
    check_step(t);
    record(t);
    GraphSlice s;
    s.time_step = t;
    s.nodes = slices_[static_cast<std::size_t>(t - 1)];
    s.labels.reserve(s.nodes.size());
    s.features = gather_rows(nodes_.features, s.nodes);
    std::unordered_map<std::size_t, std::size_t> local;
    local.reserve(s.nodes.size());
    for (std::size_t k = 0; k < s.nodes.size(); ++k) {
      local.emplace(s.nodes[k], k);
      s.labels.push_back(labels_[s.nodes[k]]);
    }
    for (std::size_t k = 0; k < s.nodes.size(); ++k)
      for (std::size_t v : out_.of(s.nodes[k])) {
        const auto it = local.find(v);
        if (it != local.end()) s.edges.emplace_back(k, it->second);
      }
    return s;
  }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Access counters per step (index t, 1..T).
  std::uint64_t access_count(int t) const {
    check_step(t);
    return counters_[static_cast<std::size_t>(t)].load(std::memory_order_relaxed);
  }
  std::vector<std::uint64_t> access_counts() const {
    std::vector<std::uint64_t> out(slices_.size() + 1, 0);
    for (std::size_t t = 1; t < out.size(); ++t)
      out[t] = counters_[t].load(std::memory_order_relaxed);
    return out;
  }
  void reset_access_counts() const {
    for (std::size_t t = 0; t <= slices_.size(); ++t)
      counters_[t].store(0, std::memory_order_relaxed);
  }

 private:
  struct Adjacency {
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> targets;

    static Adjacency build(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& e,
                           bool reverse) {
      Adjacency a;
      a.offsets.assign(n + 1, 0);
      for (const auto& [s, d] : e) ++a.offsets[(reverse ? d : s) + 1];
      for (std::size_t i = 0; i < n; ++i) a.offsets[i + 1] += a.offsets[i];
      a.targets.resize(e.size());
      std::vector<std::size_t> fill(a.offsets.begin(), a.offsets.end() - 1);
      for (const auto& [s, d] : e) a.targets[fill[reverse ? d : s]++] = reverse ? s : d;
      for (std::size_t i = 0; i < n; ++i)
        std::sort(a.targets.begin() + static_cast<std::ptrdiff_t>(a.offsets[i]),
                  a.targets.begin() + static_cast<std::ptrdiff_t>(a.offsets[i + 1]));
      return a;
    }
    std::span<const std::size_t> of(std::size_t i) const {
      return {targets.data() + offsets.at(i), offsets[i + 1] - offsets[i]};
    }
  };

  void check_step(int t) const {
    if (t < 1 || t > max_step())
      throw RangeError("time step " + std::to_string(t) + " outside 1.." +
                       std::to_string(max_step()));
  }
  void record(int t) const noexcept {
    if (counters_) counters_[static_cast<std::size_t>(t)].fetch_add(1, std::memory_order_relaxed);
  }

  NodeTable nodes_;
  std::unordered_map<TxId, std::size_t> index_;
  std::vector<Label> labels_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  Adjacency out_;
  Adjacency in_;
  std::vector<std::vector<std::size_t>> slices_;
  std::vector<std::string> warnings_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> counters_;
};

}  // namespace chronoaml
