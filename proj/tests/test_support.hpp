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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chronoaml/core/rng.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/numerics/dense.hpp"
#include "chronoaml/numerics/sparse.hpp"

namespace chronoaml::testing {

// Two nodes at t=1 joined by one edge, one isolated node at t=2; labels
// illicit / licit / unknown; 166 features of which 94 are local.
inline TemporalGraph three_node_graph() {
  NodeTable t;
  t.node_ids = {101, 202, 303};
  t.time_steps = {1, 1, 2};
  t.local_count = 94;
  t.total_count = 166;
  t.features = DenseMatrix(3, 166);
  for (std::size_t i = 0; i < 3; ++i) {
    t.features(i, 0) = t.time_steps[i];
    for (std::size_t j = 1; j < 166; ++j) t.features(i, j) = 0.01 * static_cast<double>(i * 1000 + j);
  }
  EdgeList e{{{101, 202}}};
  LabelMap l{{{101, Label::illicit}, {202, Label::licit}, {303, Label::unknown}}};
  return TemporalGraph::build(std::move(t), e, l);
}

inline DenseMatrix random_dense(std::size_t r, std::size_t c, RngStream& rng, double scale = 1.0) {
  DenseMatrix m(r, c);
  for (double& v : m.values()) v = rng.uniform(-scale, scale);
  return m;
}

// Random directed 0/1 adjacency without self-loops.
inline SparseMatrix random_adjacency(std::size_t n, double density, RngStream& rng) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rng.uniform() < density) t.push_back({i, j, 1.0});
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

// Random single-step graph with the given feature width; every node labeled
// unless unknown_rate says otherwise.
inline TemporalGraph random_graph(std::size_t n, int steps, std::size_t features, RngStream& rng,
                                  double density = 0.15, double unknown_rate = 0.2) {
  NodeTable t;
  t.local_count = features;
  t.total_count = features;
  t.features = DenseMatrix(n, features);
  for (std::size_t i = 0; i < n; ++i) {
    t.node_ids.push_back(static_cast<TxId>(5000 + 7 * i));
    t.time_steps.push_back(1 + static_cast<int>(i % static_cast<std::size_t>(steps)));
    t.features(i, 0) = t.time_steps.back();
    for (std::size_t j = 1; j < features; ++j) t.features(i, j) = rng.normal();
  }
  EdgeList e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && t.time_steps[i] == t.time_steps[j] && rng.uniform() < density)
        e.edges.emplace_back(t.node_ids[i], t.node_ids[j]);
  LabelMap l;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    l.entries.emplace_back(t.node_ids[i], u < unknown_rate ? Label::unknown
                                          : u < unknown_rate + (1 - unknown_rate) / 2 ? Label::illicit
                                                                                       : Label::licit);
  }
  return TemporalGraph::build(std::move(t), e, l);
}

// Slices of 12 nodes in two communities of six. In each community three
// unlabeled context nodes carry the community class in feature 0 (+2 illicit,
// -2 licit); the three labeled nodes link only to those context nodes and
// have pure-noise features. Model features are [signal, noise].
struct PlantedFixture {
  TemporalGraph graph;
  DenseMatrix features;
  std::vector<std::size_t> labeled;  // graph indices of the labeled nodes
};

inline PlantedFixture planted_communities(int slices, std::uint64_t seed) {
  RngStream rng(seed);
  NodeTable t;
  t.local_count = 1;
  t.total_count = 1;
  const std::size_t n = static_cast<std::size_t>(slices) * 12;
  t.features = DenseMatrix(n, 1);
  DenseMatrix model(n, 2);
  EdgeList e;
  LabelMap l;
  std::vector<std::size_t> labeled;
  for (int s = 0; s < slices; ++s) {
    const bool first_illicit = rng.uniform() < 0.5;
    for (std::size_t c = 0; c < 2; ++c) {
      const bool illicit = (c == 0) == first_illicit;
      const std::size_t base = static_cast<std::size_t>(s) * 12 + c * 6;
      for (std::size_t k = 0; k < 6; ++k) {
        const std::size_t i = base + k;
        t.node_ids.push_back(static_cast<TxId>(10000 + i));
        t.time_steps.push_back(s + 1);
        t.features(i, 0) = s + 1;
        if (k < 3) {
          model(i, 0) = (illicit ? 2.0 : -2.0) + 0.1 * rng.normal();
          model(i, 1) = rng.normal();
          l.entries.emplace_back(t.node_ids.back(), Label::unknown);
        } else {
          model(i, 0) = rng.normal();
          model(i, 1) = rng.normal();
          l.entries.emplace_back(t.node_ids.back(), illicit ? Label::illicit : Label::licit);
          labeled.push_back(i);
        }
      }
      const auto id = [&](std::size_t k) { return static_cast<TxId>(10000 + base + k); };
      e.edges.emplace_back(id(0), id(1));
      e.edges.emplace_back(id(1), id(2));
      for (std::size_t k = 3; k < 6; ++k)
        for (std::size_t ctx = 0; ctx < 3; ++ctx) e.edges.emplace_back(id(ctx), id(k));
    }
    const auto first = static_cast<TxId>(10000 + s * 12);
    e.edges.emplace_back(first, first + 6);
  }
  return {TemporalGraph::build(std::move(t), e, l), std::move(model), std::move(labeled)};
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("chronoaml_" + tag + "_" + std::to_string(RngStream::mix(reinterpret_cast<std::uintptr_t>(this)) % 1000000));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace chronoaml::testing
