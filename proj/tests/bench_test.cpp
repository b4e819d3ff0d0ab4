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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "chronoaml/bench/experiment.hpp"
#include "chronoaml/bench/metrics.hpp"
#include "chronoaml/bench/report.hpp"
#include "chronoaml/bench/split.hpp"
#include "chronoaml/graph/synthetic.hpp"
#include "test_support.hpp"

namespace chronoaml {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TemporalGraph small_synthetic(std::uint64_t seed = 1) {
  SyntheticConfig cfg;
  cfg.steps = 8;
  cfg.min_nodes_per_step = 30;
  cfg.max_nodes_per_step = 50;
  cfg.illicit_rate = 0.25;
  cfg.seed = seed;
  return synthetic_graph(cfg);
}

ExperimentConfig quick(ModelFamily family, FeatureSet features) {
  ExperimentConfig c;
  c.family = family;
  c.features = features;
  c.split.boundary = 5;
  c.seed = 3;
  c.logreg.epochs = 60;
  c.mlp.epochs = 60;
  c.mlp.hidden = 8;
  c.forest.estimators = 5;
  c.gcn.hidden = 8;
  c.gcn.epochs = 30;
  c.gcn.learning_rate = 0.01;
  c.evolve.hidden = 4;
  c.evolve.epochs = 10;
  c.embedding.hidden = 6;
  c.embedding.epochs = 20;
  return c;
}

TEST(SplitTest, PartitionsLabeledNodesByStep) {
  const TemporalGraph g = small_synthetic();
  const TemporalSplit s = temporal_split(g, {5});
  std::size_t labeled = 0;
  for (Label l : g.labels()) labeled += is_labeled(l);
  EXPECT_EQ(s.train.size() + s.test.size(), labeled);
  for (std::size_t v : s.train) EXPECT_LE(g.time_step(v), 5);
  for (std::size_t v : s.test) EXPECT_GT(g.time_step(v), 5);
  std::vector<std::size_t> both;
  std::set_intersection(s.train.begin(), s.train.end(), s.test.begin(), s.test.end(),
                        std::back_inserter(both));
  EXPECT_TRUE(both.empty());

  const TemporalSplit last = temporal_split(g, {7});
  for (std::size_t v : last.test) EXPECT_EQ(g.time_step(v), 8);
  EXPECT_FALSE(last.test.empty());
  EXPECT_THROW(temporal_split(g, {0}), RangeError);
  EXPECT_THROW(temporal_split(g, {8}), RangeError);
}

TEST(MetricsTest, ClosedForms) {
  // TP=2, FP=1, FN=2, TN=3
  const std::vector<int> actual{1, 1, 1, 1, 0, 0, 0, 0};
  const std::vector<int> predicted{1, 1, 0, 0, 1, 0, 0, 0};
  const MetricsReport m = compute_metrics(predicted, actual);
  EXPECT_NEAR(m.illicit.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.illicit.recall, 0.5, 1e-12);
  EXPECT_NEAR(m.illicit.f1, 4.0 / 7.0, 1e-12);
  EXPECT_EQ(m.illicit.support, 4u);
  EXPECT_DOUBLE_EQ(m.micro_f1, 5.0 / 8.0);
  EXPECT_NEAR(f1_score(0.956, 0.670), 0.788, 5e-4);
  EXPECT_NEAR(f1_score(0.850, 0.624), 0.720, 5e-4);
  EXPECT_EQ(f1_score(0, 0), 0.0);
}

TEST(MetricsTest, ZeroDivisionIsFlagged) {
  const std::vector<int> actual{1, 0, 0}, none(3, 0);
  const MetricsReport m = compute_metrics(none, actual);
  EXPECT_TRUE(m.illicit.precision_undefined);
  EXPECT_FALSE(m.illicit.recall_undefined);
  EXPECT_EQ(m.illicit.f1, 0.0);
  const MetricsReport n = compute_metrics(none, none);
  EXPECT_TRUE(n.illicit.recall_undefined);
  EXPECT_THROW(compute_metrics(std::vector<int>{}, std::vector<int>{}), ConfigError);
  EXPECT_THROW(compute_metrics(std::vector<int>{1}, std::vector<int>{-1}), RangeError);
}

TEST(MetricsTest, MicroF1IsAccuracyAndOrderFree) {
  RngStream rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<int> a(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.below(2));
      p[i] = static_cast<int>(rng.below(2));
    }
    const MetricsReport m = compute_metrics(p, a);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < n; ++i) hit += a[i] == p[i];
    EXPECT_NEAR(m.micro_f1, static_cast<double>(hit) / static_cast<double>(n), 1e-12);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> a2, p2;
    for (std::size_t i : perm) a2.push_back(a[i]), p2.push_back(p[i]);
    const MetricsReport m2 = compute_metrics(p2, a2);
    EXPECT_EQ(m.illicit.f1, m2.illicit.f1);
    EXPECT_EQ(m.micro_f1, m2.micro_f1);
  }
}

TEST(MetricsTest, PerStepSeries) {
  const TemporalGraph g = small_synthetic();
  std::vector<int> perfect, licit(g.node_count(), 0);
  for (Label l : g.labels()) perfect.push_back(l == Label::illicit ? 1 : 0);
  const std::vector<int> steps{6, 7, 8};
  for (const auto& s : per_timestep_f1(perfect, g, steps))
    if (s.support_illicit > 0) {
      EXPECT_EQ(s.f1, 1.0);
    }
  for (const auto& s : per_timestep_f1(licit, g, steps)) {
    EXPECT_EQ(s.f1, 0.0);
    EXPECT_TRUE(s.precision_undefined);
    EXPECT_NE(s.flags().find("no_predicted_illicit"), std::string::npos);
  }
  EXPECT_THROW(per_timestep_f1(perfect, g, {}), ConfigError);

  // A step whose only node is unlabeled is reported absent, not as zero.
  const TemporalGraph tiny = testing::three_node_graph();
  const std::vector<int> p{1, 0, 0}, all{1, 2};
  const auto series = per_timestep_f1(p, tiny, all);
  EXPECT_FALSE(series[0].absent);
  EXPECT_TRUE(series[1].absent);
  EXPECT_EQ(series[1].flags(), "absent");
  EXPECT_TRUE(std::isnan(mean_f1(series, 2, 2)));
}

TEST(ExperimentTest, NamesAndParsing) {
  ExperimentConfig c;
  EXPECT_EQ(c.experiment_id(), "rf-af-b34-s0");
  EXPECT_EQ(c.method(), "RandomForest^AF");
  c.family = ModelFamily::skip_gcn;
  EXPECT_EQ(c.method(), "Skip-GCN");
  c.family = ModelFamily::mlp;
  c.features = parse_feature_set("af_ne");
  EXPECT_EQ(c.method(), "MLP^AF+NE");
  EXPECT_EQ(c.experiment_id(), "mlp-af_ne-b34-s0");
  EXPECT_EQ(parse_feature_set("LF"), FeatureSet::lf);
  EXPECT_THROW(parse_feature_set("xf"), ConfigError);
  c.family = ModelFamily::skip_gcn;
  EXPECT_TRUE(c.gcn_config().skip);
  EXPECT_EQ(c.hyperparameters().at("skip"), true);
}

TEST(ExperimentTest, NoFamilyReadsHeldOutStepsWhileTraining) {
  const TemporalGraph g = small_synthetic(4);
  for (auto family : {ModelFamily::logreg, ModelFamily::mlp, ModelFamily::random_forest,
                      ModelFamily::gcn, ModelFamily::skip_gcn, ModelFamily::evolve_gcn}) {
    for (auto fs : {FeatureSet::lf, FeatureSet::af_ne}) {
      const ExperimentResult r = run_experiment(quick(family, fs), g);
      EXPECT_EQ(r.test_step_reads, 0u) << family_tag(family);
      EXPECT_EQ(r.report.at("leak_check").at("test_step_reads"), 0);
      EXPECT_EQ(r.series.size(), 3u);
      EXPECT_EQ(r.metrics.count, temporal_split(g, {5}).test.size());
      EXPECT_EQ(r.embedding.has_value(), fs == FeatureSet::af_ne);
    }
  }
}

TEST(ExperimentTest, ReportsAndArtifactsAreByteIdentical) {
  const TemporalGraph g = small_synthetic(5);
  testing::TempDir a("bench_a"), b("bench_b");
  for (auto family : {ModelFamily::random_forest, ModelFamily::gcn}) {
    auto cfg = quick(family, FeatureSet::af_ne);
    write_experiment(run_experiment(cfg, g), a.path());
    write_experiment(run_experiment(cfg, g), b.path());
    const std::string id = cfg.experiment_id();
    for (const auto& rel : {"reports/" + id + ".json", "reports/" + id + ".csv",
                            "series/" + id + ".csv", "artifacts/" + id + ".json",
                            "artifacts/" + id + "-embedding.json"}) {
      ASSERT_TRUE(std::filesystem::exists(a.path() / rel)) << rel;
      EXPECT_EQ(slurp(a.path() / rel), slurp(b.path() / rel)) << rel;
    }
  }
  const std::string csv = slurp(a.path() / "reports" / "rf-af_ne-b5-s3.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kReportColumns);
  const std::string series = slurp(a.path() / "series" / "gcn-af_ne-b5-s3.csv");
  EXPECT_EQ(series.substr(0, series.find('\n')), "time_step,f1,support_illicit,flags");
  EXPECT_EQ(std::count(series.begin(), series.end(), '\n'), 4);

  const auto reports = load_reports(a.path() / "reports");
  ASSERT_EQ(reports.size(), 2u);
  const std::string table = render_table(reports);
  EXPECT_NE(table.find("GCN^AF+NE"), std::string::npos);
  EXPECT_NE(table.find("RandomForest^AF+NE"), std::string::npos);
  EXPECT_NE(table.find("MicroAVG F1"), std::string::npos);
}

TEST(ExperimentTest, RetrainPerStepGrowsTrainingSet) {
  const TemporalGraph g = small_synthetic(6);
  auto cfg = quick(ModelFamily::random_forest, FeatureSet::af);
  const ExperimentResult fixed = run_experiment(cfg, g);
  cfg.retrain_per_step = true;
  const ExperimentResult re = run_experiment(cfg, g);
  ASSERT_EQ(re.train_sizes.size(), 3u);
  for (std::size_t k = 1; k < re.train_sizes.size(); ++k)
    EXPECT_GT(re.train_sizes[k], re.train_sizes[k - 1]);
  EXPECT_EQ(re.train_sizes[0], fixed.train_count);
  // The first test step sees the same training set, so the same model.
  EXPECT_EQ(re.series[0].f1, fixed.series[0].f1);
  EXPECT_EQ(re.test_step_reads, 0u);
  EXPECT_EQ(re.metrics.count, fixed.metrics.count);
  EXPECT_EQ(cfg.method(), "RandomForest^AF (retrained)");
}

TEST(ExperimentTest, RejectsBadBoundary) {
  const TemporalGraph g = small_synthetic();
  auto cfg = quick(ModelFamily::logreg, FeatureSet::lf);
  cfg.split.boundary = 8;
  EXPECT_THROW(run_experiment(cfg, g), RangeError);
}

}  // namespace
}  // namespace chronoaml
