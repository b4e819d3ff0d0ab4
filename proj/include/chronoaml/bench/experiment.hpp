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
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoaml/bench/metrics.hpp"
#include "chronoaml/bench/split.hpp"
#include "chronoaml/features/feature_matrix.hpp"
#include "chronoaml/graph/csv_io.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/models/artifact.hpp"

namespace chronoaml {

enum class FeatureSet { lf, af, lf_ne, af_ne };

inline const char* feature_set_name(FeatureSet f) noexcept {
  switch (f) {
    case FeatureSet::lf: return "LF";
    case FeatureSet::af: return "AF";
    case FeatureSet::lf_ne: return "LF+NE";
    default: return "AF+NE";
  }
}

inline FeatureSet parse_feature_set(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  std::replace(s.begin(), s.end(), '_', '+');
  for (auto f : {FeatureSet::lf, FeatureSet::af, FeatureSet::lf_ne, FeatureSet::af_ne})
    if (s == feature_set_name(f)) return f;
  throw ConfigError("unknown feature set '" + s + "' (expected lf, af, lf+ne or af+ne)");
}

inline bool uses_embeddings(FeatureSet f) noexcept {
  return f == FeatureSet::lf_ne || f == FeatureSet::af_ne;
}

inline FeatureMode base_mode(FeatureSet f) noexcept {
  return f == FeatureSet::lf || f == FeatureSet::lf_ne ? FeatureMode::LF : FeatureMode::AF;
}

struct ExperimentConfig {
  std::string id;  // derived from the other fields when empty
  ModelFamily family = ModelFamily::random_forest;
  FeatureSet features = FeatureSet::af;
  SplitSpec split;
  std::uint64_t seed = 0;
  bool retrain_per_step = false;
  LogRegConfig logreg;
  MlpConfig mlp;
  ForestConfig forest;
  GcnConfig gcn;
  EvolveConfig evolve;
  GcnConfig embedding;  // the GCN whose hidden layer supplies NE columns

  std::string experiment_id() const {
    if (!id.empty()) return id;
    std::string f = feature_set_name(features);
    std::transform(f.begin(), f.end(), f.begin(), [](unsigned char c) { return std::tolower(c); });
    std::replace(f.begin(), f.end(), '+', '_');
    std::string out = std::string(family_tag(family)) + "-" + f + "-b" +
                      std::to_string(split.boundary) + "-s" + std::to_string(seed);
    if (retrain_per_step) out += "-retrain";
    return out;
  }

  // Table row label, e.g. RandomForest^AF+NE. Graph models on AF print bare.
  std::string method() const {
    std::string m = family_display_name(family);
    if (!is_graph_family(family) || features != FeatureSet::af) m += std::string("^") + feature_set_name(features);
    if (retrain_per_step) m += " (retrained)";
    return m;
  }

  // Family configs with the experiment seed applied.
  LogRegConfig logreg_config() const { auto c = logreg; c.seed = seed; return c; }
  MlpConfig mlp_config() const { auto c = mlp; c.seed = seed; return c; }
  ForestConfig forest_config() const { auto c = forest; c.seed = seed; return c; }
  GcnConfig gcn_config() const {
    auto c = gcn;
    c.seed = seed;
    c.skip = family == ModelFamily::skip_gcn;
    return c;
  }
  EvolveConfig evolve_config() const { auto c = evolve; c.seed = seed; return c; }
  GcnConfig embedding_config() const { auto c = embedding; c.seed = seed; return c; }

  nlohmann::json hyperparameters() const {
    switch (family) {
      case ModelFamily::logreg: return logreg_config();
      case ModelFamily::mlp: return mlp_config();
      case ModelFamily::random_forest: return forest_config();
      case ModelFamily::gcn:
      case ModelFamily::skip_gcn: return gcn_config();
      default: return evolve_config();
    }
  }
};

struct ExperimentResult {
  ExperimentConfig config;
  MetricsReport metrics;
  std::vector<StepF1> series;
  ModelArtifact artifact;  // with retrain_per_step, the model of the last step
  std::optional<ModelArtifact> embedding;
  std::uint64_t test_step_reads = 0;  // graph reads of held-out steps while training
  std::vector<std::size_t> train_sizes;
  std::size_t train_count = 0;
  nlohmann::json report;
};

namespace detail {

inline std::uint64_t reads_after(const TemporalGraph& g, int boundary) {
  std::uint64_t n = 0;
  for (int t = boundary + 1; t <= g.max_step(); ++t) n += g.access_count(t);
  return n;
}

struct FitOutcome {
  ModelArtifact model;
  std::optional<ModelArtifact> embedding;
  DenseMatrix eval_probs;
  std::uint64_t late_reads = 0;
};

// Trains on train_nodes and predicts eval_nodes. Every training call is
// bracketed by the graph's access counters for steps after boundary.
inline FitOutcome fit_and_predict(const ExperimentConfig& cfg, const TemporalGraph& g,
                                  std::span<const std::size_t> train_nodes,
                                  std::span<const std::size_t> eval_nodes, int boundary) {
  FitOutcome out;
  const auto train_phase = [&](auto&& fn) {
    const std::uint64_t before = reads_after(g, boundary);
    auto result = fn();
    out.late_reads += reads_after(g, boundary) - before;
    return result;
  };
  const FeatureMode mode = base_mode(cfg.features);
  FeatureMatrix x = assemble(g.node_table(), mode);
  if (uses_embeddings(cfg.features)) {
    out.embedding = train_phase(
        [&] { return train_gcn(g, x.values, train_nodes, cfg.embedding_config()); });
    x = assemble(g.node_table(), mode, extract_embeddings(*out.embedding, g, x.values));
  }

  if (is_graph_family(cfg.family)) {
    out.model = train_phase([&] {
      return cfg.family == ModelFamily::evolve_gcn
                 ? train_evolvegcn(g, x.values, train_nodes, cfg.evolve_config())
                 : train_gcn(g, x.values, train_nodes, cfg.gcn_config());
    });
    out.eval_probs = gather_rows(predict(out.model, x.values, &g), eval_nodes);
    return out;
  }

  out.model = train_phase([&] {
    const DenseMatrix xt = gather_rows(x.values, train_nodes);
    std::vector<int> yt;
    yt.reserve(train_nodes.size());
    for (std::size_t v : train_nodes) yt.push_back(target_of(g.label(v)));
    std::vector<std::size_t> rows(train_nodes.size());
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = k;
    switch (cfg.family) {
      case ModelFamily::logreg: return train_logreg(xt, yt, rows, cfg.logreg_config());
      case ModelFamily::mlp: return train_mlp(xt, yt, rows, cfg.mlp_config());
      default: return train_random_forest(xt, yt, rows, cfg.forest_config());
    }
  });
  out.eval_probs = predict(out.model, gather_rows(x.values, eval_nodes));
  return out;
}

inline std::vector<int> actual_targets(const TemporalGraph& g, std::span<const std::size_t> nodes) {
  std::vector<int> y;
  y.reserve(nodes.size());
  const auto labels = g.labels();
  for (std::size_t v : nodes) y.push_back(target_of(labels[v]));
  return y;
}

}  // namespace detail

inline nlohmann::json report_json(const ExperimentResult& r) {
  const auto& c = r.config;
  nlohmann::json j = {{"id", c.experiment_id()},
                      {"method", c.method()},
                      {"family", family_tag(c.family)},
                      {"features", feature_set_name(c.features)},
                      {"split", {{"boundary", c.split.boundary}}},
                      {"seed", c.seed},
                      {"retrain_per_step", c.retrain_per_step},
                      {"hyperparameters", c.hyperparameters()},
                      {"train_count", r.train_count},
                      {"metrics", to_json_value(r.metrics)},
                      {"series", to_json_value(std::span<const StepF1>(r.series))},
                      {"leak_check", {{"test_step_reads", r.test_step_reads}}}};
  if (uses_embeddings(c.features)) j["embedding_hyperparameters"] = c.embedding_config();
  if (c.retrain_per_step) j["train_sizes"] = r.train_sizes;
  return j;
}

// Split, assemble features, train, predict the test steps, score.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const TemporalGraph& g) {
  check_split(g, cfg.split);
  ExperimentResult r;
  r.config = cfg;
  const int last = g.max_step();
  std::vector<int> test_steps;
  for (int t = cfg.split.boundary + 1; t <= last; ++t) test_steps.push_back(t);

  std::vector<int> predicted(g.node_count(), 0);
  std::vector<std::size_t> evaluated;
  if (!cfg.retrain_per_step) {
    const TemporalSplit split = temporal_split(g, cfg.split);
    if (split.test.empty()) throw ConfigError("run_experiment: no labeled test nodes");
    auto fit = detail::fit_and_predict(cfg, g, split.train, split.test, cfg.split.boundary);
    const auto classes = predicted_classes(fit.eval_probs);
    for (std::size_t k = 0; k < split.test.size(); ++k) predicted[split.test[k]] = classes[k];
    evaluated = split.test;
    r.train_count = split.train.size();
    r.artifact = std::move(fit.model);
    r.embedding = std::move(fit.embedding);
    r.test_step_reads = fit.late_reads;
  } else {
    // Step t is predicted by a model trained on every labeled node before t.
    const auto labels = g.labels();
    std::vector<std::size_t> train;
    for (int t = 1; t <= last; ++t) {
      if (t > cfg.split.boundary) {
        std::vector<std::size_t> eval;
        for (std::size_t v : g.step_nodes(t))
          if (is_labeled(labels[v])) eval.push_back(v);
        if (!eval.empty()) {
          auto fit = detail::fit_and_predict(cfg, g, train, eval, t - 1);
          const auto classes = predicted_classes(fit.eval_probs);
          for (std::size_t k = 0; k < eval.size(); ++k) predicted[eval[k]] = classes[k];
          evaluated.insert(evaluated.end(), eval.begin(), eval.end());
          r.train_sizes.push_back(train.size());
          r.test_step_reads += fit.late_reads;
          r.artifact = std::move(fit.model);
          r.embedding = std::move(fit.embedding);
        }
      }
      for (std::size_t v : g.step_nodes(t))
        if (is_labeled(labels[v])) train.push_back(v);
      std::sort(train.begin(), train.end());
    }
    r.train_count = r.train_sizes.empty() ? 0 : r.train_sizes.front();
  }
  std::sort(evaluated.begin(), evaluated.end());
  std::vector<int> p;
  p.reserve(evaluated.size());
  for (std::size_t v : evaluated) p.push_back(predicted[v]);
  r.metrics = compute_metrics(p, detail::actual_targets(g, evaluated));
  r.series = per_timestep_f1(predicted, g, test_steps);
  r.report = report_json(r);
  return r;
}

inline constexpr const char* kReportColumns = "Method,Illicit Precision,Illicit Recall,Illicit F1,MicroAVG F1";

inline std::string report_row_csv(const nlohmann::json& report) {
  const auto& m = report.at("metrics");
  const auto& ill = m.at("illicit");
  std::string row = report.at("method").get<std::string>();
  for (double v : {ill.at("precision").get<double>(), ill.at("recall").get<double>(),
                   ill.at("f1").get<double>(), m.at("micro_f1").get<double>()}) {
    row += ',';
    csv::append_double(row, v);
  }
  return row;
}

inline std::string series_csv(std::span<const StepF1> series) {
  std::string out = "time_step,f1,support_illicit,flags\n";
  for (const auto& s : series) {
    out += std::to_string(s.time_step) + ',';
    if (!s.absent) csv::append_double(out, s.f1);
    out += ',' + std::to_string(s.support_illicit) + ',' + s.flags() + '\n';
  }
  return out;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace detail

// Writes reports/<id>.json and .csv, series/<id>.csv and artifacts/<id>.json
// (plus artifacts/<id>-embedding.json for NE runs) under root.
inline void write_experiment(const ExperimentResult& r, const std::filesystem::path& root) {
  const std::string id = r.config.experiment_id();
  detail::write_text(root / "reports" / (id + ".json"), r.report.dump(2) + "\n");
  detail::write_text(root / "reports" / (id + ".csv"),
                     std::string(kReportColumns) + "\n" + report_row_csv(r.report) + "\n");
  detail::write_text(root / "series" / (id + ".csv"), series_csv(r.series));
  std::filesystem::create_directories(root / "artifacts");
  save_artifact(r.artifact, (root / "artifacts" / (id + ".json")).string());
  if (r.embedding) save_artifact(*r.embedding, (root / "artifacts" / (id + "-embedding.json")).string());
}

}  // namespace chronoaml
