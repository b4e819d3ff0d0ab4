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
#include <numeric>
#include <string>
#include <vector>

#include "chronoaml/graph/temporal_graph.hpp"

namespace chronoaml {

struct ValidationReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t illicit_count = 0;
  std::size_t licit_count = 0;
  std::size_t unknown_count = 0;
  std::size_t time_step_count = 0;
  std::vector<std::size_t> per_step_node_counts;  // index t-1
  std::size_t cross_step_edge_count = 0;
  std::vector<std::size_t> components_per_step;   // index t-1
  std::vector<std::string> warnings;
};

namespace detail {
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};
}  // namespace detail

// Pure analysis; structural oddities become warnings, never errors.
inline ValidationReport validate(const TemporalGraph& g) {
  ValidationReport r;
  r.node_count = g.node_count();
  r.edge_count = g.edge_count();
  r.time_step_count = g.time_step_count();
  r.warnings = g.warnings();
  for (Label l : g.labels()) {
    if (l == Label::illicit)
      ++r.illicit_count;
    else if (l == Label::licit)
      ++r.licit_count;
    else
      ++r.unknown_count;
  }
  for (const auto& [s, d] : g.edges())
    if (g.time_step(s) != g.time_step(d)) ++r.cross_step_edge_count;
  if (r.cross_step_edge_count > 0)
    r.warnings.push_back(std::to_string(r.cross_step_edge_count) +
                         " edge(s) connect different time steps");

  // Components over the undirected view of each step; cross-step edges ignored.
  detail::DisjointSets sets(g.node_count());
  std::vector<std::size_t> components(static_cast<std::size_t>(g.max_step()), 0);
  for (const auto& [s, d] : g.edges())
    if (g.time_step(s) == g.time_step(d)) sets.unite(s, d);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (sets.find(i) == i) ++components[static_cast<std::size_t>(g.time_step(i) - 1)];

  for (int t = 1; t <= g.max_step(); ++t) {
    const std::size_t count = g.step_nodes(t).size();
    const std::size_t c = components[static_cast<std::size_t>(t - 1)];
    r.per_step_node_counts.push_back(count);
    r.components_per_step.push_back(c);
    if (count == 0)
      r.warnings.push_back("time step " + std::to_string(t) + " has no nodes");
    else if (c > 1)
      r.warnings.push_back("time step " + std::to_string(t) + " has " + std::to_string(c) +
                           " connected components");
  }
  return r;
}

}  // namespace chronoaml
