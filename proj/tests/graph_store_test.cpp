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
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "chronoaml/graph/csv_io.hpp"
#include "chronoaml/graph/synthetic.hpp"
#include "chronoaml/graph/validate.hpp"
#include "test_support.hpp"

namespace chronoaml {
namespace {

using testing::TempDir;

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string feature_row(long id, int ts, int width, double base) {
  std::string s = std::to_string(id) + "," + std::to_string(ts);
  for (int j = 1; j < width; ++j) s += "," + std::to_string(base + j * 0.5);
  return s + "\n";
}

struct Fixture {
  TempDir dir{"ingest"};
  DatasetPaths paths = DatasetPaths::in_directory(dir.path());

  Fixture() {
    write(paths.features, feature_row(11, 1, 166, 0.0) + feature_row(22, 1, 166, 1.0) +
                              feature_row(33, 2, 166, -2.0));
    write(paths.edges, "txId1,txId2\n11,22\n");
    write(paths.classes, "txId,class\n11,1\n22,2\n33,unknown\n");
  }
};

TEST(IngestTest, ThreeNodeFixture) {
  Fixture f;
  const TemporalGraph g = ingest(f.paths);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.max_step(), 2);
  EXPECT_EQ(g.total_count(), 166u);
  EXPECT_EQ(g.local_count(), 94u);
  const auto s1 = g.step_nodes(1);
  ASSERT_EQ(s1.size(), 2u);
  EXPECT_EQ(g.node_id(s1[0]), 11);
  EXPECT_EQ(g.node_id(s1[1]), 22);
  ASSERT_EQ(g.step_nodes(2).size(), 1u);
  EXPECT_EQ(g.label(0), Label::illicit);
  EXPECT_EQ(g.label(1), Label::licit);
  EXPECT_EQ(g.label(2), Label::unknown);
  EXPECT_EQ(g.out_neighbors(0).size(), 1u);
  EXPECT_EQ(g.in_neighbors(1).size(), 1u);
  EXPECT_EQ(g.features()(2, 0), 2.0);
}

TEST(IngestTest, CrlfAndMissingClassesDefaultToUnknown) {
  TempDir dir("crlf");
  const auto p = DatasetPaths::in_directory(dir.path());
  write(p.features, "1,1,0.5,0.25\r\n2,1,1.5,2\r\n");
  write(p.edges, "txId1,txId2\r\n2,1\r\n");
  write(p.classes, "txId,class\r\n1,2\r\n");
  const TemporalGraph g = ingest(p, {.local_count = 2});
  EXPECT_EQ(g.total_count(), 3u);
  EXPECT_EQ(g.labels()[1], Label::unknown);
  EXPECT_EQ(g.labels()[0], Label::licit);
}

TEST(IngestTest, MalformedRowsReportLineNumbers) {
  Fixture f;
  write(f.paths.features, feature_row(11, 1, 166, 0.0) + "22,1,abc\n");
  try {
    ingest(f.paths);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::string bad = feature_row(11, 1, 166, 0.0);
  bad.replace(bad.find(",0.500000,"), 10, ",x.500000,");
  write(f.paths.features, bad);
  EXPECT_THROW(ingest(f.paths), ParseError);
  write(f.paths.features, feature_row(11, 1, 166, 0.0));
  write(f.paths.classes, "txId,class\n11,3\n");
  EXPECT_THROW(ingest(f.paths), ParseError);
  write(f.paths.classes, "id,label\n11,1\n");
  EXPECT_THROW(ingest(f.paths), ParseError);
}

TEST(IngestTest, DanglingEdgeNamesThePair) {
  Fixture f;
  write(f.paths.edges, "txId1,txId2\n11,22\n11,999\n");
  try {
    ingest(f.paths);
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("(11, 999)"), std::string::npos);
  }
}

TEST(IngestTest, DuplicateIdsAndCrossStepEdgesRejected) {
  Fixture f;
  write(f.paths.features, feature_row(11, 1, 166, 0.0) + feature_row(11, 1, 166, 1.0));
  write(f.paths.edges, "txId1,txId2\n");
  write(f.paths.classes, "txId,class\n");
  EXPECT_THROW(ingest(f.paths), IntegrityError);

  Fixture g;
  write(g.paths.edges, "txId1,txId2\n11,33\n");
  EXPECT_THROW(ingest(g.paths), IntegrityError);
  IngestOptions lax;
  lax.build.require_time_locality = false;
  const TemporalGraph loose = ingest(g.paths, lax);
  EXPECT_EQ(validate(loose).cross_step_edge_count, 1u);
}

TEST(IngestTest, DuplicateEdgesCollapseWithWarning) {
  Fixture f;
  write(f.paths.edges, "txId1,txId2\n11,22\n11,22\n22,11\n");
  const TemporalGraph g = ingest(f.paths);
  EXPECT_EQ(g.edge_count(), 2u);
  ASSERT_EQ(g.warnings().size(), 1u);
  EXPECT_NE(validate(g).warnings.front().find("duplicate"), std::string::npos);
}

TEST(ValidateTest, FixtureCounts) {
  const TemporalGraph g = testing::three_node_graph();
  const ValidationReport r = validate(g);
  EXPECT_EQ(r.node_count, 3u);
  EXPECT_EQ(r.edge_count, 1u);
  EXPECT_EQ(r.illicit_count, 1u);
  EXPECT_EQ(r.licit_count, 1u);
  EXPECT_EQ(r.unknown_count, 1u);
  EXPECT_EQ(r.time_step_count, 2u);
  EXPECT_EQ(r.cross_step_edge_count, 0u);
  EXPECT_EQ(r.components_per_step, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(r.per_step_node_counts, (std::vector<std::size_t>{2, 1}));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(ValidateTest, SplitComponentIsWarningNotError) {
  NodeTable t;
  t.node_ids = {1, 2, 3, 4};
  t.time_steps = {1, 1, 1, 1};
  t.local_count = t.total_count = 1;
  t.features = DenseMatrix(4, 1, 1.0);
  const TemporalGraph g = TemporalGraph::build(std::move(t), EdgeList{{{1, 2}, {3, 4}}}, LabelMap{});
  const ValidationReport r = validate(g);
  EXPECT_EQ(r.components_per_step, (std::vector<std::size_t>{2}));
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(SliceTest, FixtureSlices) {
  const TemporalGraph g = testing::three_node_graph();
  const GraphSlice s1 = g.slice(1);
  EXPECT_EQ(s1.nodes.size(), 2u);
  EXPECT_EQ(s1.edges.size(), 1u);
  EXPECT_EQ(s1.features.rows(), 2u);
  const GraphSlice s2 = g.slice(2);
  EXPECT_EQ(s2.nodes.size(), 1u);
  EXPECT_TRUE(s2.edges.empty());
  EXPECT_EQ(s2.labels.front(), Label::unknown);
  EXPECT_THROW(g.slice(0), RangeError);
  EXPECT_THROW(g.slice(3), RangeError);
}

TEST(SliceTest, SlicesPartitionTheGraph) {
  RngStream rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const TemporalGraph g = testing::random_graph(40 + rng.below(40), 1 + static_cast<int>(rng.below(6)), 4, rng);
    std::size_t nodes = 0, edges = 0;
    std::vector<int> seen(g.node_count(), 0);
    for (int t = 1; t <= g.max_step(); ++t) {
      const GraphSlice s = g.slice(t);
      nodes += s.nodes.size();
      edges += s.edges.size();
      for (std::size_t i : s.nodes) ++seen[i];
    }
    EXPECT_EQ(nodes, g.node_count());
    EXPECT_EQ(edges, g.edge_count());
    for (int c : seen) EXPECT_EQ(c, 1);
    const ValidationReport r = validate(g);
    EXPECT_EQ(r.illicit_count + r.licit_count + r.unknown_count, r.node_count);
  }
}

TEST(SliceTest, AccessCountersTrackSteps) {
  const TemporalGraph g = testing::three_node_graph();
  g.reset_access_counts();
  (void)g.slice(1);
  (void)g.label(2);
  EXPECT_EQ(g.access_count(1), 1u);
  EXPECT_EQ(g.access_count(2), 1u);
  g.reset_access_counts();
  EXPECT_EQ(g.access_count(1), 0u);
}

TEST(RoundTripTest, ExportThenIngestIsIdentical) {
  SyntheticConfig cfg;
  cfg.steps = 4;
  cfg.seed = 9;
  const TemporalGraph g = synthetic_graph(cfg);
  TempDir dir("roundtrip");
  const auto p = DatasetPaths::in_directory(dir.path());
  export_csv(g, p);
  const TemporalGraph h = ingest(p, {.local_count = g.local_count()});
  ASSERT_EQ(h.node_count(), g.node_count());
  EXPECT_EQ(h.features(), g.features());
  EXPECT_EQ(h.edges(), g.edges());
  EXPECT_TRUE(std::equal(h.labels().begin(), h.labels().end(), g.labels().begin()));
  EXPECT_TRUE(std::equal(h.node_ids().begin(), h.node_ids().end(), g.node_ids().begin()));

  // Same bytes, same structure.
  const TemporalGraph h2 = ingest(p, {.local_count = g.local_count()});
  EXPECT_EQ(h2.features(), h.features());
  EXPECT_EQ(h2.edges(), h.edges());
}

TEST(SyntheticTest, StepsAreConnectedAndTimeLocal) {
  SyntheticConfig cfg;
  cfg.steps = 6;
  const TemporalGraph g = synthetic_graph(cfg);
  const ValidationReport r = validate(g);
  EXPECT_EQ(r.time_step_count, 6u);
  EXPECT_EQ(r.cross_step_edge_count, 0u);
  for (std::size_t c : r.components_per_step) EXPECT_EQ(c, 1u);
  EXPECT_GT(r.illicit_count, 0u);
  EXPECT_GT(r.licit_count, r.illicit_count);
  for (const auto& [s, d] : g.edges()) EXPECT_EQ(g.time_step(s), g.time_step(d));
}

}  // namespace
}  // namespace chronoaml
