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
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "chronoaml/core/rng.hpp"
#include "chronoaml/features/aggregate.hpp"
#include "chronoaml/graph/temporal_graph.hpp"

namespace chronoaml {

// Generator for Elliptic-shaped temporal graphs: disjoint connected steps,
// rare illicit class, mostly unlabeled nodes, local features plus one-hop
// aggregates. After regime_shift_step the illicit feature signature moves,
// which degrades any model trained on earlier steps.
struct SyntheticConfig {
  int steps = 20;
  std::size_t min_nodes_per_step = 60;
  std::size_t max_nodes_per_step = 120;
  std::size_t local_count = 10;    // includes the time-step column
  double illicit_rate = 0.12;      // among all nodes
  double labeled_rate = 0.5;       // fraction of nodes that carry a label
  double extra_edge_rate = 0.3;    // extra edges per node beyond the spanning tree
  double homophily = 0.8;          // chance an extra edge stays within class
  double signal = 1.2;             // class separation of informative columns
  int regime_shift_step = 0;       // 0 disables the shift
  std::uint64_t seed = 0;
  TxId first_id = 1000;
};

struct SyntheticData {
  NodeTable nodes;
  EdgeList edges;
  LabelMap labels;
};

inline SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  RngStream rng(cfg.seed);
  SyntheticData out;
  std::vector<double> local;
  std::vector<bool> illicit_truth;
  TxId next_id = cfg.first_id;
  const std::size_t informative = cfg.local_count > 1 ? cfg.local_count - 1 : 0;

  std::vector<double> licit_mean(informative), illicit_mean(informative), shifted_mean(informative);
  for (std::size_t j = 0; j < informative; ++j) {
    licit_mean[j] = rng.normal(0.0, 0.5);
    illicit_mean[j] = licit_mean[j] + (j % 2 == 0 ? cfg.signal : -cfg.signal) * (j < informative / 2 + 1 ? 1.0 : 0.25);
    shifted_mean[j] = licit_mean[j] + (j % 3 == 0 ? -0.5 * cfg.signal : 0.3 * cfg.signal);
  }

  for (int t = 1; t <= cfg.steps; ++t) {
    const std::size_t span = cfg.max_nodes_per_step - cfg.min_nodes_per_step + 1;
    const std::size_t n = cfg.min_nodes_per_step + rng.below(span);
    const std::size_t base = out.nodes.node_ids.size();
    const bool shifted = cfg.regime_shift_step > 0 && t > cfg.regime_shift_step;
    for (std::size_t k = 0; k < n; ++k) {
      const bool illicit = rng.uniform() < cfg.illicit_rate;
      illicit_truth.push_back(illicit);
      const TxId id = next_id;
      next_id += 1 + static_cast<TxId>(rng.below(3));
      out.nodes.node_ids.push_back(id);
      out.nodes.time_steps.push_back(t);
      local.push_back(static_cast<double>(t));
      for (std::size_t j = 0; j < informative; ++j) {
        const double mu = illicit ? (shifted ? shifted_mean[j] : illicit_mean[j]) : licit_mean[j];
        local.push_back(rng.normal(mu, 1.0));
      }
      if (rng.uniform() < cfg.labeled_rate)
        out.labels.entries.emplace_back(id, illicit ? Label::illicit : Label::licit);
      else
        out.labels.entries.emplace_back(id, Label::unknown);
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    auto add_edge = [&](std::size_t a, std::size_t b) {
      if (a == b) return;
      if (rng.uniform() < 0.5) std::swap(a, b);
      if (seen.count({a, b}) || seen.count({b, a})) return;
      seen.insert({a, b});
      out.edges.edges.emplace_back(out.nodes.node_ids[base + a], out.nodes.node_ids[base + b]);
    };
    // Spanning tree keeps every step a single component.
    for (std::size_t k = 1; k < n; ++k) {
      std::size_t parent = rng.below(k);
      for (int tries = 0; tries < 4; ++tries) {
        if (illicit_truth[base + parent] == illicit_truth[base + k] || rng.uniform() > cfg.homophily)
          break;
        parent = rng.below(k);
      }
      add_edge(k, parent);
    }
    const auto extra = static_cast<std::size_t>(cfg.extra_edge_rate * static_cast<double>(n));
    for (std::size_t e = 0; e < extra; ++e) {
      const std::size_t a = rng.below(n);
      std::size_t b = rng.below(n);
      for (int tries = 0; tries < 8; ++tries) {
        if (illicit_truth[base + a] == illicit_truth[base + b] || rng.uniform() > cfg.homophily)
          break;
        b = rng.below(n);
      }
      add_edge(a, b);
    }
  }

  const std::size_t n_total = out.nodes.node_ids.size();
  NodeTable local_table;
  local_table.node_ids = out.nodes.node_ids;
  local_table.time_steps = out.nodes.time_steps;
  local_table.local_count = cfg.local_count;
  local_table.total_count = cfg.local_count;
  local_table.features = DenseMatrix(n_total, cfg.local_count, local);
  const TemporalGraph local_graph = TemporalGraph::build(local_table, out.edges, out.labels);

  AggregateConfig agg;
  agg.statistics = {Statistic::min, Statistic::max, Statistic::mean};
  for (std::size_t c = 1; c < cfg.local_count; ++c) agg.source_columns.push_back(c);
  const FeatureMatrix aggregated = aggregate_neighbor_stats(local_graph, agg);

  out.nodes.local_count = cfg.local_count;
  out.nodes.total_count = cfg.local_count + aggregated.cols();
  out.nodes.features = concat_columns(local_table.features, aggregated.values);
  out.nodes.node_ids = std::move(local_table.node_ids);
  out.nodes.time_steps = std::move(local_table.time_steps);
  return out;
}

inline TemporalGraph synthetic_graph(const SyntheticConfig& cfg) {
  SyntheticData d = generate_synthetic(cfg);
  return TemporalGraph::build(std::move(d.nodes), d.edges, d.labels);
}

}  // namespace chronoaml
