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
#include <span>
#include <string>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/core/parallel.hpp"
#include "chronoaml/features/feature_matrix.hpp"
#include "chronoaml/graph/temporal_graph.hpp"

namespace chronoaml {

enum class Statistic { min, max, mean, std };
enum class Direction { in, out };

inline const char* statistic_name(Statistic s) noexcept {
  switch (s) {
    case Statistic::min: return "min";
    case Statistic::max: return "max";
    case Statistic::mean: return "mean";
    default: return "std";
  }
}
inline const char* direction_name(Direction d) noexcept { return d == Direction::in ? "in" : "out"; }

struct AggregateConfig {
  std::vector<Statistic> statistics{Statistic::min, Statistic::max, Statistic::mean, Statistic::std};
  std::vector<Direction> directions{Direction::in, Direction::out};
  std::vector<std::size_t> source_columns;

  void check(std::size_t local_count) const {
    if (statistics.empty()) throw ConfigError("AggregateConfig: no statistics");
    if (directions.empty()) throw ConfigError("AggregateConfig: no directions");
    for (std::size_t c : source_columns)
      if (c >= local_count)
        throw ConfigError("AggregateConfig: source column " + std::to_string(c) +
                          " is not a local feature");
  }

  // One column per statistic per source column per direction, plus one
  // neighbor-count column per direction.
  std::size_t output_width() const noexcept {
    return directions.size() * (source_columns.size() * statistics.size() + 1);
  }
};

struct NeighborSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1); 0 when n <= 1
};

// Empty input summarizes to all zeros.
inline NeighborSummary summarize(std::span<const double> values) {
  NeighborSummary s;
  const std::size_t n = values.size();
  if (n == 0) return s;
  s.min = values[0];
  s.max = values[0];
  double sum = 0.0;
  for (double v : values) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    sum += v;
  }
  s.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  // Rounding can push the mean a hair outside [min, max] for near-equal values.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

inline double pick(const NeighborSummary& s, Statistic stat) noexcept {
  switch (stat) {
    case Statistic::min: return s.min;
    case Statistic::max: return s.max;
    case Statistic::mean: return s.mean;
    default: return s.std;
  }
}

// One-hop neighbor statistics of local feature columns.
inline FeatureMatrix aggregate_neighbor_stats(const TemporalGraph& g, const AggregateConfig& cfg) {
  cfg.check(g.local_count());
  const std::size_t n = g.node_count();
  FeatureMatrix m;
  m.values = DenseMatrix(n, cfg.output_width());
  for (Direction d : cfg.directions) {
    for (std::size_t c : cfg.source_columns)
      for (Statistic s : cfg.statistics) {
        m.provenance.push_back(Provenance::aggregated);
        m.names.push_back(std::string(direction_name(d)) + "_" + statistic_name(s) + "_c" +
                          std::to_string(c));
      }
    m.provenance.push_back(Provenance::aggregated);
    m.names.push_back(std::string(direction_name(d)) + "_count");
  }

  const DenseMatrix& x = g.features();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> buf;
    for (std::size_t i = begin; i < end; ++i) {
      auto out = m.values.row(i);
      std::size_t col = 0;
      for (Direction d : cfg.directions) {
        const auto nbrs = d == Direction::in ? g.in_neighbors(i) : g.out_neighbors(i);
        for (std::size_t c : cfg.source_columns) {
          buf.clear();
          for (std::size_t v : nbrs) buf.push_back(x(v, c));
          const NeighborSummary s = summarize(buf);
          for (Statistic stat : cfg.statistics) out[col++] = pick(s, stat);
        }
        out[col++] = static_cast<double>(nbrs.size());
      }
    }
  }, 512);
  return m;
}

}  // namespace chronoaml
