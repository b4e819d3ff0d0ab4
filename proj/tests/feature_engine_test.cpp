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
#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "chronoaml/features/aggregate.hpp"
#include "chronoaml/features/feature_matrix.hpp"
#include "test_support.hpp"

namespace chronoaml {
namespace {

TemporalGraph star(std::vector<double> in_values, std::vector<double> out_values) {
  NodeTable t;
  t.local_count = t.total_count = 2;
  const std::size_t n = 1 + in_values.size() + out_values.size();
  t.features = DenseMatrix(n, 2);
  EdgeList e;
  for (std::size_t i = 0; i < n; ++i) {
    t.node_ids.push_back(static_cast<TxId>(i + 1));
    t.time_steps.push_back(1);
    t.features(i, 0) = 1.0;
  }
  std::size_t k = 1;
  for (double v : in_values) {
    t.features(k, 1) = v;
    e.edges.emplace_back(static_cast<TxId>(k + 1), 1);
    ++k;
  }
  for (double v : out_values) {
    t.features(k, 1) = v;
    e.edges.emplace_back(1, static_cast<TxId>(k + 1));
    ++k;
  }
  return TemporalGraph::build(std::move(t), e, LabelMap{});
}

AggregateConfig column_one() {
  AggregateConfig c;
  c.source_columns = {1};
  return c;
}

TEST(AggregateTest, TwoInNeighbors) {
  const TemporalGraph g = star({1.0, 3.0}, {});
  const FeatureMatrix m = aggregate_neighbor_stats(g, column_one());
  // Layout: in_{min,max,mean,std}, in_count, out_{min,max,mean,std}, out_count.
  ASSERT_EQ(m.cols(), 10u);
  EXPECT_EQ(m.values(0, 0), 1.0);
  EXPECT_EQ(m.values(0, 1), 3.0);
  EXPECT_EQ(m.values(0, 2), 2.0);
  EXPECT_NEAR(m.values(0, 3), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(m.values(0, 4), 2.0);
  for (std::size_t c = 5; c < 10; ++c) EXPECT_EQ(m.values(0, c), 0.0);
  EXPECT_EQ(m.names[4], "in_count");
}

TEST(AggregateTest, SingleOutNeighborAndEmptyNeighborhood) {
  const TemporalGraph g = star({}, {4.25});
  const FeatureMatrix m = aggregate_neighbor_stats(g, column_one());
  EXPECT_EQ(m.values(0, 5), 4.25);
  EXPECT_EQ(m.values(0, 6), 4.25);
  EXPECT_EQ(m.values(0, 7), 4.25);
  EXPECT_EQ(m.values(0, 8), 0.0);
  EXPECT_EQ(m.values(0, 9), 1.0);
  for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(m.values(0, c), 0.0);
}

TEST(AggregateTest, MatchesBruteForceEnumeration) {
  RngStream rng(43);
  const TemporalGraph g = testing::random_graph(50, 2, 6, rng, 0.1);
  AggregateConfig cfg;
  cfg.source_columns = {1, 3, 5};
  const FeatureMatrix m = aggregate_neighbor_stats(g, cfg);
  const auto& x = g.features();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    std::size_t col = 0;
    for (Direction d : cfg.directions) {
      // Enumerate neighbors from the raw edge list, independent of the CSR.
      std::vector<std::size_t> nbrs;
      for (const auto& [s, t] : g.edges()) {
        if (d == Direction::in && t == i) nbrs.push_back(s);
        if (d == Direction::out && s == i) nbrs.push_back(t);
      }
      for (std::size_t c : cfg.source_columns) {
        double mn = 0, mx = 0, mean = 0, sd = 0;
        if (!nbrs.empty()) {
          mn = mx = x(nbrs[0], c);
          for (std::size_t v : nbrs) {
            mn = std::min(mn, x(v, c));
            mx = std::max(mx, x(v, c));
            mean += x(v, c);
          }
          mean /= static_cast<double>(nbrs.size());
          if (nbrs.size() > 1) {
            for (std::size_t v : nbrs) sd += (x(v, c) - mean) * (x(v, c) - mean);
            sd = std::sqrt(sd / static_cast<double>(nbrs.size() - 1));
          }
        }
        EXPECT_EQ(m.values(i, col++), mn);
        EXPECT_EQ(m.values(i, col++), mx);
        EXPECT_NEAR(m.values(i, col++), mean, 1e-12);
        EXPECT_NEAR(m.values(i, col++), sd, 1e-12);
      }
      EXPECT_EQ(m.values(i, col++), static_cast<double>(nbrs.size()));
    }
  }
}

TEST(AggregateTest, InvariantToNeighborOrder) {
  RngStream rng(47);
  std::vector<double> vals;
  for (int i = 0; i < 9; ++i) vals.push_back(rng.normal());
  const FeatureMatrix a = aggregate_neighbor_stats(star(vals, {}), column_one());
  for (int trial = 0; trial < 5; ++trial) {
    shuffle(vals.begin(), vals.end(), rng);
    const FeatureMatrix b = aggregate_neighbor_stats(star(vals, {}), column_one());
    for (std::size_t c = 0; c < a.cols(); ++c) EXPECT_NEAR(a.values(0, c), b.values(0, c), 1e-12);
  }
}

TEST(AggregateTest, OrderingInvariantsHold) {
  RngStream rng(53);
  const TemporalGraph g = testing::random_graph(80, 3, 4, rng, 0.2);
  const FeatureMatrix m = aggregate_neighbor_stats(g, AggregateConfig{.source_columns = {1, 2, 3}});
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t base = 0; base < m.cols(); base += 13)
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t o = base + 4 * c;
        EXPECT_LE(m.values(i, o), m.values(i, o + 2));
        EXPECT_LE(m.values(i, o + 2), m.values(i, o + 1));
        EXPECT_GE(m.values(i, o + 3), 0.0);
      }
}

TEST(AggregateTest, RejectsBadConfig) {
  const TemporalGraph g = testing::three_node_graph();
  EXPECT_THROW(aggregate_neighbor_stats(g, AggregateConfig{.statistics = {}, .source_columns = {1}}),
               ConfigError);
  EXPECT_THROW(aggregate_neighbor_stats(g, AggregateConfig{.directions = {}, .source_columns = {1}}),
               ConfigError);
  EXPECT_THROW(aggregate_neighbor_stats(g, AggregateConfig{.source_columns = {94}}), ConfigError);
}

TEST(AssembleTest, LocalAndAllFeatureSets) {
  const TemporalGraph g = testing::three_node_graph();
  const FeatureMatrix lf = assemble(g.node_table(), FeatureMode::LF);
  const FeatureMatrix af = assemble(g.node_table(), FeatureMode::AF);
  EXPECT_EQ(lf.cols(), 94u);
  EXPECT_EQ(lf.rows(), 3u);
  EXPECT_EQ(af.cols(), 166u);
  EXPECT_EQ(af.count(Provenance::local), 94u);
  EXPECT_EQ(af.count(Provenance::aggregated), 72u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 94; ++j) EXPECT_EQ(lf.values(i, j), af.values(i, j));
  EXPECT_EQ(lf.values(2, 0), 2.0);
}

TEST(AssembleTest, EmbeddingsAppendAfterFeatures) {
  const TemporalGraph g = testing::three_node_graph();
  const FeatureMatrix m = assemble(g.node_table(), FeatureMode::AF, DenseMatrix(3, 100, 0.5));
  EXPECT_EQ(m.cols(), 266u);
  EXPECT_EQ(m.count(Provenance::embedding), 100u);
  EXPECT_EQ(m.values(1, 166), 0.5);
  EXPECT_EQ(m.values(1, 165), g.features()(1, 165));
  EXPECT_THROW(assemble(g.node_table(), FeatureMode::LF, DenseMatrix(2, 100)), ShapeError);
}

TEST(AssembleTest, CsvExportHasProvenanceHeader) {
  const TemporalGraph g = testing::three_node_graph();
  testing::TempDir dir("features");
  const auto path = dir.path() / "f.csv";
  export_feature_csv(assemble(g.node_table(), FeatureMode::AF, DenseMatrix(3, 2)), g, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("txId,local:ts,local:f2", 0), 0u);
  EXPECT_NE(header.find("aggregated:f95"), std::string::npos);
  EXPECT_NE(header.find("embedding:ne1"), std::string::npos);
  EXPECT_EQ(row.rfind("101,1,", 0), 0u);
}

}  // namespace
}  // namespace chronoaml
