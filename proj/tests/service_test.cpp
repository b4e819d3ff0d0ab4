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
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "chronoaml/graph/synthetic.hpp"
#include "chronoaml/models/gcn.hpp"
#include "chronoaml/service/api.hpp"
#include "chronoaml/service/layout.hpp"
#include "chronoaml/service/server.hpp"
#include "test_support.hpp"

namespace chronoaml {
namespace {

using nlohmann::json;

json get(const ApiService& api, const std::string& path, std::map<std::string, std::string> q = {}) {
  const ApiResponse r = api.handle(path, q);
  return json::parse(r.body);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TemporalGraph synthetic(std::uint64_t seed = 2) {
  SyntheticConfig cfg;
  cfg.steps = 4;
  cfg.min_nodes_per_step = 20;
  cfg.max_nodes_per_step = 40;
  cfg.seed = seed;
  return synthetic_graph(cfg);
}

TEST(ServiceTest, FixtureEndpoints) {
  const TemporalGraph g = testing::three_node_graph();
  const ApiService api(g, {build_layout(g, LayoutMode::raw_features)}, {1, 0, 0});
  const json steps = get(api, "/api/timesteps");
  EXPECT_EQ(steps["count"], 2);
  EXPECT_EQ(steps["min"], 1);
  EXPECT_EQ(steps["max"], 2);
  EXPECT_EQ(steps["steps"][0]["nodes"], 2);

  const json s2 = get(api, "/api/slice/2");
  ASSERT_EQ(s2["nodes"].size(), 1u);
  EXPECT_EQ(s2["edges"].size(), 0u);
  EXPECT_EQ(s2["nodes"][0]["txId"], 303);
  EXPECT_EQ(s2["nodes"][0]["label"], "unknown");
  EXPECT_EQ(s2["nodes"][0]["predicted"], "licit");
  const json s1 = get(api, "/api/slice/1", {{"layout", "raw"}});
  ASSERT_EQ(s1["edges"].size(), 1u);
  EXPECT_EQ(s1["edges"][0]["source"], 101);
  EXPECT_EQ(s1["edges"][0]["target"], 202);
  EXPECT_EQ(s1["nodes"][0]["predicted"], "illicit");
  EXPECT_EQ(s1["nodes"][0]["degree"], 1);
  EXPECT_EQ(s1["stats"]["transfer"]["matrix"][0][1], 1);  // illicit -> licit

  const json tx = get(api, "/api/tx/202");
  EXPECT_EQ(tx["in"], json::array({101}));
  EXPECT_EQ(tx["out"], json::array());
  EXPECT_EQ(tx["neighbors"], json::array({101}));
  EXPECT_EQ(tx["time_step"], 1);
}

TEST(ServiceTest, StructuredErrors) {
  const TemporalGraph g = testing::three_node_graph();
  const ApiService api(g, {build_layout(g, LayoutMode::raw_features)});
  for (const char* path : {"/api/slice/3", "/api/slice/0", "/api/slice/x", "/api/stats/9",
                           "/api/tx/999", "/api/tx/abc", "/api/nothing"}) {
    const ApiResponse r = api.handle(path, {});
    EXPECT_EQ(r.status, 404) << path;
    const json j = json::parse(r.body);
    EXPECT_EQ(j["error"]["status"], 404);
    EXPECT_TRUE(j["error"]["code"].is_string());
  }
  EXPECT_EQ(get(api, "/api/slice/1", {{"layout", "gcn"}})["error"]["code"], "unknown_layout");
  EXPECT_EQ(api.handle("/api/search", {}).status, 400);
  EXPECT_TRUE(get(api, "/api/tx/303")["predicted"].is_null());
}

TEST(ServiceTest, SearchIsSubstringOrderedAndCapped) {
  NodeTable t;
  t.local_count = t.total_count = 2;
  t.features = DenseMatrix(300, 2);
  LabelMap l;
  for (std::size_t i = 0; i < 300; ++i) {
    t.node_ids.push_back(static_cast<TxId>(1230 + 7 * (299 - i)));
    t.time_steps.push_back(1);
    t.features(i, 0) = 1;
    t.features(i, 1) = static_cast<double>(i);
  }
  const TemporalGraph g = TemporalGraph::build(std::move(t), {}, l);
  const ApiService api(g, {build_layout(g, LayoutMode::raw_features)});
  for (const std::string q : {"123", "7", "99", "2"}) {
    const json j = get(api, "/api/search", {{"q", q}});
    std::vector<TxId> expected;
    for (TxId id : g.node_ids())
      if (std::to_string(id).find(q) != std::string::npos) expected.push_back(id);
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(j["total"], expected.size());
    if (expected.size() > 100) expected.resize(100);
    EXPECT_EQ(j["results"].get<std::vector<TxId>>(), expected) << q;
    EXPECT_EQ(j["truncated"], j["total"].get<std::size_t>() > 100);
  }
  const json wide = get(api, "/api/search", {{"q", "2"}});
  ASSERT_GT(wide["total"].get<std::size_t>(), 100u);
  EXPECT_EQ(wide["results"].size(), 100u);
  EXPECT_TRUE(wide["truncated"].get<bool>());
}

TEST(ServiceTest, TransferMatrixReconcilesWithDegrees) {
  const TemporalGraph g = synthetic();
  const ApiService api(g, {build_layout(g, LayoutMode::raw_features)});
  for (int t = 1; t <= g.max_step(); ++t) {
    const json s = get(api, "/api/stats/" + std::to_string(t));
    const auto m = s["transfer"]["matrix"].get<std::vector<std::vector<std::size_t>>>();
    std::size_t total = 0;
    std::array<std::size_t, 3> out_deg{}, in_deg{};
    for (std::size_t v : g.step_nodes(t)) {
      out_deg[class_slot(g.labels()[v])] += g.out_neighbors(v).size();
      in_deg[class_slot(g.labels()[v])] += g.in_neighbors(v).size();
    }
    for (std::size_t a = 0; a < 3; ++a) {
      std::size_t row = 0, col = 0;
      for (std::size_t b = 0; b < 3; ++b) row += m[a][b], col += m[b][a];
      EXPECT_EQ(row, out_deg[a]);
      EXPECT_EQ(col, in_deg[a]);
      total += row;
    }
    EXPECT_EQ(total, s["edges"].get<std::size_t>());
    const json slice = get(api, "/api/slice/" + std::to_string(t));
    EXPECT_EQ(slice["edges"].size(), total);
    EXPECT_EQ(slice["nodes"].size(), g.step_nodes(t).size());
    EXPECT_EQ(api.handle("/api/slice/" + std::to_string(t), {}).body,
              api.handle("/api/slice/" + std::to_string(t), {}).body);
  }
}

TEST(ServiceTest, NeighborListIsInOutUnion) {
  const TemporalGraph g = synthetic(3);
  const ApiService api(g, {build_layout(g, LayoutMode::raw_features)});
  for (std::size_t v = 0; v < g.node_count(); v += 7) {
    const json tx = get(api, "/api/tx/" + std::to_string(g.node_id(v)));
    std::set<TxId> expected;
    for (std::size_t w : g.in_neighbors(v)) expected.insert(g.node_id(w));
    for (std::size_t w : g.out_neighbors(v)) expected.insert(g.node_id(w));
    EXPECT_EQ(tx["neighbors"].get<std::vector<TxId>>(), std::vector<TxId>(expected.begin(), expected.end()));
  }
}

TEST(LayoutTest, GlobalDeterministicAndPersisted) {
  const TemporalGraph g = synthetic();
  const ProjectionLayout a = build_layout(g, LayoutMode::raw_features);
  const ProjectionLayout b = build_layout(g, LayoutMode::raw_features);
  EXPECT_EQ(a.coords.rows(), g.node_count());
  testing::TempDir dir("layout");
  save_layout(a, g, dir.path() / "a.csv");
  save_layout(b, g, dir.path() / "b.csv");
  EXPECT_EQ(slurp(dir.path() / "a.csv"), slurp(dir.path() / "b.csv"));
  const ProjectionLayout back = load_layout(g, dir.path() / "a.csv");
  EXPECT_EQ(back.coords, a.coords);
  EXPECT_EQ(back.mode, LayoutMode::raw_features);

  EXPECT_THROW(build_layout(g, LayoutMode::gcn_activations), ConfigError);
  std::vector<std::size_t> mask;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (is_labeled(g.labels()[v])) mask.push_back(v);
  GcnConfig cfg;
  cfg.hidden = 4;
  cfg.epochs = 5;
  const ModelArtifact gcn = train_gcn(g, g.features(), mask, cfg);
  const ProjectionLayout act = build_layout(g, LayoutMode::gcn_activations, &gcn, "gcn.json");
  EXPECT_EQ(act.coords.rows(), g.node_count());
  save_layout(act, g, dir.path() / "gcn.csv");
  EXPECT_EQ(load_layout(g, dir.path() / "gcn.csv").model, "gcn.json");
}

TEST(LayoutTest, IdenticalRowsShareCoordinates) {
  NodeTable t;
  t.local_count = t.total_count = 3;
  t.features = DenseMatrix{{1, 0.5, 2}, {1, 0.5, 2}, {1, -1, 0}, {2, 3, 1}, {2, 0, 0}};
  t.node_ids = {1, 2, 3, 4, 5};
  t.time_steps = {1, 1, 1, 2, 2};
  const TemporalGraph g = TemporalGraph::build(std::move(t), {}, {});
  const ProjectionLayout l = build_layout(g, LayoutMode::raw_features);
  EXPECT_EQ(l.coords(0, 0), l.coords(1, 0));
  EXPECT_EQ(l.coords(0, 1), l.coords(1, 1));
}

TEST(ServerTest, LoopbackRoundTrip) {
  const TemporalGraph g = testing::three_node_graph();
  const ApiService api(g, {build_layout(g, LayoutMode::raw_features)},
                       {}, json::array({json{{"id", "x"}}}));
  testing::TempDir web("web");
  { std::ofstream(web.path() / "index.html") << "<html>chronograph</html>"; }
  ApiServer server(api);
  const int port = server.start({"127.0.0.1", 0, web.path()});
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  auto r = client.Get("/api/slice/2");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, api.handle("/api/slice/2", {}).body);
  r = client.Get("/api/search?q=30");
  ASSERT_TRUE(r);
  EXPECT_EQ(json::parse(r->body)["results"], json::array({303}));
  r = client.Get("/api/tx/42");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  r = client.Get("/api/experiments");
  ASSERT_TRUE(r);
  EXPECT_EQ(json::parse(r->body)["reports"][0]["id"], "x");
  r = client.Get("/index.html");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->body, "<html>chronograph</html>");
  server.stop();
}

}  // namespace
}  // namespace chronoaml
