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
#include <span>
#include <string>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/numerics/sparse.hpp"

namespace chronoaml {

// Symmetrized, self-looped and normalized adjacency of one slice.
inline SparseMatrix slice_adjacency(const GraphSlice& s) {
  std::vector<Triplet> t;
  t.reserve(s.edges.size());
  for (const auto& [a, b] : s.edges) t.push_back({a, b, 1.0});
  const std::size_t n = s.nodes.size();
  return normalize_adjacency(SparseMatrix::from_triplets(n, n, std::move(t)), true);
}

// A set of time steps stacked into one block-diagonal propagation problem.
// Row r of every member belongs to graph node nodes[r].
struct GraphBatch {
  std::vector<int> steps;
  std::vector<std::size_t> offsets;  // rows of steps[k] are [offsets[k], offsets[k+1])
  std::vector<std::size_t> nodes;
  std::vector<SparseMatrix> blocks;  // per-step normalized adjacency
  SparseMatrix adjacency;            // block_diagonal(blocks)
  DenseMatrix features;
  std::vector<int> targets;  // -1 for unknown

  std::size_t rows() const noexcept { return nodes.size(); }

  // Batch rows of the given graph node indices; nodes outside the batch
  // raise RangeError.
  std::vector<std::size_t> rows_of(std::span<const std::size_t> graph_nodes) const {
    std::vector<std::size_t> sorted_rows(nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r) sorted_rows[r] = r;
    std::sort(sorted_rows.begin(), sorted_rows.end(),
              [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    std::vector<std::size_t> out;
    out.reserve(graph_nodes.size());
    for (std::size_t v : graph_nodes) {
      const auto it = std::lower_bound(sorted_rows.begin(), sorted_rows.end(), v,
                                       [&](std::size_t r, std::size_t x) { return nodes[r] < x; });
      if (it == sorted_rows.end() || nodes[*it] != v)
        throw RangeError("graph batch: node " + std::to_string(v) + " is not in the batch steps");
      out.push_back(*it);
    }
    return out;
  }

  // Copies batch rows back into an (node_count x cols) matrix.
  void scatter(const DenseMatrix& batch_rows, DenseMatrix& out) const {
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      const auto src = batch_rows.row(r);
      std::copy(src.begin(), src.end(), out.row(nodes[r]).begin());
    }
  }
};

// Reads each listed step through TemporalGraph::slice, so the graph's access
// counters see exactly these steps.
inline GraphBatch make_graph_batch(const TemporalGraph& g, const DenseMatrix& features,
                                   std::span<const int> steps) {
  if (features.rows() != g.node_count())
    throw ShapeError("make_graph_batch: feature rows " + std::to_string(features.rows()) +
                     " != node count " + std::to_string(g.node_count()));
  GraphBatch b;
  b.steps.assign(steps.begin(), steps.end());
  b.offsets.push_back(0);
  for (int t : steps) {
    const GraphSlice s = g.slice(t);
    b.blocks.push_back(slice_adjacency(s));
    b.nodes.insert(b.nodes.end(), s.nodes.begin(), s.nodes.end());
    for (Label l : s.labels) b.targets.push_back(target_of(l));
    b.offsets.push_back(b.nodes.size());
  }
  b.adjacency = block_diagonal(b.blocks);
  b.features = gather_rows(features, b.nodes);
  return b;
}

inline std::vector<int> step_range(int first, int last) {
  std::vector<int> s;
  for (int t = first; t <= last; ++t) s.push_back(t);
  return s;
}

// Distinct time steps of the given nodes, ascending.
inline std::vector<int> steps_of(const TemporalGraph& g, std::span<const std::size_t> nodes) {
  std::vector<int> s;
  s.reserve(nodes.size());
  for (std::size_t v : nodes) s.push_back(g.time_step(v));
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace chronoaml
