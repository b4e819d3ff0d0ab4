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
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronoaml/bench/experiment.hpp"
#include "chronoaml/bench/report.hpp"
#include "chronoaml/features/aggregate.hpp"
#include "chronoaml/features/feature_matrix.hpp"
#include "chronoaml/graph/csv_io.hpp"
#include "chronoaml/graph/synthetic.hpp"
#include "chronoaml/graph/validate.hpp"
#include "chronoaml/models/artifact.hpp"
#include "chronoaml/service/api.hpp"
#include "chronoaml/service/layout.hpp"
#include "chronoaml/service/server.hpp"

namespace fs = std::filesystem;
using namespace chronoaml;

namespace {

struct DataFlags {
  std::string dir;
  std::string features, edges, classes;
  std::size_t local_count = 94;

  void add(CLI::App* app, const char* features_flag = "--features-csv") {
    app->add_option("--data-dir", dir, "Directory holding the three dataset CSVs")
        ->envname("CHRONOAML_DATA_DIR");
    app->add_option(features_flag, features, "Node feature CSV (overrides --data-dir)");
    app->add_option("--edges", edges, "Edge list CSV (overrides --data-dir)");
    app->add_option("--classes", classes, "Class label CSV (overrides --data-dir)");
    app->add_option("--local-count", local_count, "Leading feature columns that are local")
        ->capture_default_str();
  }

  TemporalGraph load() const {
    DatasetPaths p = dir.empty() ? DatasetPaths{} : DatasetPaths::in_directory(dir);
    if (!features.empty()) p.features = features;
    if (!edges.empty()) p.edges = edges;
    if (!classes.empty()) p.classes = classes;
    if (p.features.empty() || p.edges.empty() || p.classes.empty())
      throw ConfigError("dataset not given: pass --data-dir or all three CSV paths");
    IngestOptions opts;
    opts.local_count = local_count;
    return ingest(p, opts);
  }
};

// Hyperparameter flags; unset ones keep the family default.
struct ModelFlags {
  std::string model = "rf";
  bool skip = false;
  std::optional<std::size_t> epochs, hidden, estimators, max_features;
  std::optional<double> lr, l2;
  std::vector<double> weights;
  bool unweighted_forest = false;

  void add(CLI::App* app) {
    app->add_option("--model", model, "lr, mlp, rf, gcn, skipgcn or evolvegcn")
        ->check(CLI::IsMember({"lr", "mlp", "rf", "gcn", "skipgcn", "evolvegcn"}))
        ->capture_default_str();
    app->add_flag("--skip", skip, "With --model gcn: add the skip connection");
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--l2", l2, "Logistic regression L2 penalty");
    app->add_option("--hidden", hidden, "Hidden width (MLP) or embedding size (GCN family)");
    app->add_option("--weights", weights, "Class weights licit,illicit")->delimiter(',')->expected(2);
    app->add_option("--estimators", estimators, "Random forest trees");
    app->add_option("--max-features", max_features, "Random forest features per split");
    app->add_flag("--unweighted-forest", unweighted_forest, "Plain Gini counts in the forest");
  }

  ModelFamily family() const {
    ModelFamily f = parse_family(model);
    if (skip && f == ModelFamily::gcn) f = ModelFamily::skip_gcn;
    return f;
  }

  void apply(ExperimentConfig& c) const {
    c.family = family();
    const auto common = [&](auto& cfg) {
      if (epochs) cfg.epochs = *epochs;
      if (lr) cfg.learning_rate = *lr;
      if (!weights.empty()) cfg.class_weights = {weights[0], weights[1]};
    };
    common(c.logreg);
    common(c.mlp);
    common(c.gcn);
    common(c.evolve);
    if (l2) c.logreg.l2 = *l2;
    if (hidden) c.mlp.hidden = c.gcn.hidden = c.evolve.hidden = *hidden;
    if (estimators) c.forest.estimators = *estimators;
    if (max_features) c.forest.max_features = *max_features;
    if (!weights.empty()) c.forest.class_weights = {weights[0], weights[1]};
    c.forest.class_weighted = !unweighted_forest;
  }
};

struct Common {
  std::string out = "out";
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--out", out, "Output root (artifacts/, reports/, series/, layouts/)")
        ->envname("CHRONOAML_OUT")
        ->capture_default_str();
    app->add_option("--seed", seed, "Seed for every random stream")
        ->envname("CHRONOAML_SEED")
        ->capture_default_str();
  }
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error("cannot write " + path.string());
}

int cmd_ingest(const DataFlags& data, bool as_json) {
  const TemporalGraph g = data.load();
  const ValidationReport r = validate(g);
  if (as_json) {
    nlohmann::json j = {{"nodes", r.node_count},
                        {"edges", r.edge_count},
                        {"time_steps", r.time_step_count},
                        {"illicit", r.illicit_count},
                        {"licit", r.licit_count},
                        {"unknown", r.unknown_count},
                        {"cross_step_edges", r.cross_step_edge_count},
                        {"per_step_nodes", r.per_step_node_counts},
                        {"components_per_step", r.components_per_step},
                        {"warnings", r.warnings}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::printf("N=%zu E=%zu T=%zu\n", r.node_count, r.edge_count, r.time_step_count);
  std::printf("illicit=%zu licit=%zu unknown=%zu cross_step_edges=%zu\n", r.illicit_count,
              r.licit_count, r.unknown_count, r.cross_step_edge_count);
  std::size_t lo = SIZE_MAX, hi = 0;
  for (auto n : r.per_step_node_counts) lo = std::min(lo, n), hi = std::max(hi, n);
  if (!r.per_step_node_counts.empty()) std::printf("nodes per step: %zu..%zu\n", lo, hi);
  for (const auto& w : g.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return 0;
}

int cmd_features(const DataFlags& data, const std::string& set, bool recompute,
                 const std::string& embeddings, const std::string& output) {
  const TemporalGraph g = data.load();
  const FeatureSet fs_ = parse_feature_set(set);
  FeatureMatrix m = assemble(g.node_table(), base_mode(fs_));
  if (recompute) {
    AggregateConfig cfg;
    for (std::size_t c = 1; c < g.local_count(); ++c) cfg.source_columns.push_back(c);
    m = append_columns(assemble(g.node_table(), FeatureMode::LF), aggregate_neighbor_stats(g, cfg));
  }
  if (uses_embeddings(fs_)) {
    if (embeddings.empty()) throw ConfigError("NE feature sets need --embedding-artifact");
    const ModelArtifact a = load_artifact(embeddings);
    m = append_columns(std::move(m), embedding_columns(extract_embeddings(a, g, features_for(g, a))));
  }
  export_feature_csv(m, g, output);
  std::printf("wrote %s (%zu x %zu: %zu local, %zu aggregated, %zu embedding)\n", output.c_str(),
              m.rows(), m.cols(), m.count(Provenance::local), m.count(Provenance::aggregated),
              m.count(Provenance::embedding));
  return 0;
}

int cmd_train(const DataFlags& data, const ModelFlags& mf, const Common& common,
              const std::string& set, int boundary, const std::string& output) {
  const TemporalGraph g = data.load();
  ExperimentConfig c;
  mf.apply(c);
  c.features = parse_feature_set(set);
  if (uses_embeddings(c.features)) throw ConfigError("train takes lf or af; use eval for NE runs");
  c.seed = common.seed;
  c.split.boundary = boundary;
  const TemporalSplit split = temporal_split(g, c.split);
  const DenseMatrix x = assemble(g.node_table(), base_mode(c.features)).values;
  ModelArtifact a;
  if (is_graph_family(c.family)) {
    a = c.family == ModelFamily::evolve_gcn ? train_evolvegcn(g, x, split.train, c.evolve_config())
                                            : train_gcn(g, x, split.train, c.gcn_config());
  } else {
    const DenseMatrix xt = gather_rows(x, split.train);
    std::vector<int> yt;
    for (std::size_t v : split.train) yt.push_back(target_of(g.label(v)));
    std::vector<std::size_t> rows(yt.size());
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = k;
    if (c.family == ModelFamily::logreg) a = train_logreg(xt, yt, rows, c.logreg_config());
    else if (c.family == ModelFamily::mlp) a = train_mlp(xt, yt, rows, c.mlp_config());
    else a = train_random_forest(xt, yt, rows, c.forest_config());
  }
  std::string id = c.experiment_id();
  const fs::path path = output.empty() ? fs::path(common.out) / "artifacts" / (id + ".json") : fs::path(output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_artifact(a, path.string());
  std::printf("wrote %s (%s, %zu features, %zu training nodes", path.string().c_str(),
              family_tag(a.family), a.feature_count, split.train.size());
  if (!a.loss_trace.empty()) std::printf(", final loss %.6f", a.loss_trace.back());
  std::printf(")\n");
  return 0;
}

int cmd_eval(const DataFlags& data, const ModelFlags& mf, const Common& common, const std::string& set,
             int boundary, bool retrain, std::optional<std::size_t> ne_hidden,
             std::optional<std::size_t> ne_epochs, const std::string& id) {
  const TemporalGraph g = data.load();
  ExperimentConfig c;
  mf.apply(c);
  c.id = id;
  c.features = parse_feature_set(set);
  c.seed = common.seed;
  c.split.boundary = boundary;
  c.retrain_per_step = retrain;
  if (ne_hidden) c.embedding.hidden = *ne_hidden;
  if (ne_epochs) c.embedding.epochs = *ne_epochs;
  const ExperimentResult r = run_experiment(c, g);
  write_experiment(r, common.out);
  std::cout << render_table({r.report});
  std::printf("wrote %s/reports/%s.json\n", common.out.c_str(), c.experiment_id().c_str());
  return 0;
}

int cmd_embed(const DataFlags& data, const std::string& artifact, const std::string& output) {
  const TemporalGraph g = data.load();
  const ModelArtifact a = load_artifact(artifact);
  const DenseMatrix e = extract_embeddings(a, g, features_for(g, a));
  std::string out = "txId";
  for (std::size_t j = 0; j < e.cols(); ++j) out += ",ne" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < e.rows(); ++i) {
    out += std::to_string(g.node_id(i));
    for (double v : e.row(i)) {
      out += ',';
      csv::append_double(out, v);
    }
    out += '\n';
  }
  write_file(output, out);
  std::printf("wrote %s (%zu x %zu)\n", output.c_str(), e.rows(), e.cols());
  return 0;
}

int cmd_layout(const DataFlags& data, const Common& common, const std::string& mode,
               const std::string& artifact, const std::string& output) {
  const TemporalGraph g = data.load();
  const LayoutMode m = parse_layout_mode(mode);
  std::optional<ModelArtifact> a;
  if (!artifact.empty()) a = load_artifact(artifact);
  const ProjectionLayout l = build_layout(g, m, a ? &*a : nullptr, artifact);
  const fs::path path = output.empty() ? fs::path(common.out) / "layouts" / (std::string(layout_key(m)) + ".csv")
                                       : fs::path(output);
  save_layout(l, g, path);
  std::printf("wrote %s (%zu nodes)\n", path.string().c_str(), g.node_count());
  return 0;
}

int cmd_serve(const DataFlags& data, const Common& common, const std::string& host, int port,
              const std::vector<std::string>& layout_files, const std::string& gcn_artifact,
              const std::string& model, const std::string& static_dir) {
  const TemporalGraph g = data.load();
  std::vector<ProjectionLayout> layouts;
  for (const auto& f : layout_files) layouts.push_back(load_layout(g, f));
  const auto has = [&](LayoutMode m) {
    for (const auto& l : layouts)
      if (l.mode == m) return true;
    return false;
  };
  if (!has(LayoutMode::raw_features)) layouts.push_back(build_layout(g, LayoutMode::raw_features));
  if (!gcn_artifact.empty() && !has(LayoutMode::gcn_activations)) {
    const ModelArtifact a = load_artifact(gcn_artifact);
    layouts.push_back(build_layout(g, LayoutMode::gcn_activations, &a, gcn_artifact));
  }
  std::vector<int> predictions;
  if (!model.empty()) {
    const ModelArtifact a = load_artifact(model);
    predictions = predicted_classes(predict(a, features_for(g, a), &g));
  }
  nlohmann::json reports = nlohmann::json::array();
  for (auto& r : load_reports(fs::path(common.out) / "reports")) reports.push_back(std::move(r));
  const ApiService api(g, std::move(layouts), std::move(predictions), std::move(reports));
  ApiServer server(api);
  const int bound = server.start({host, port, static_dir});
  std::printf("serving on http://%s:%d\n", host.c_str(), bound);
  std::fflush(stdout);
  server.wait();
  return 0;
}

int cmd_report(const Common& common, const std::string& dir, const std::string& output) {
  const fs::path reports = dir.empty() ? fs::path(common.out) / "reports" : fs::path(dir);
  const auto rows = load_reports(reports);
  if (rows.empty()) throw ConfigError("no reports in " + reports.string());
  const std::string table = render_table(rows);
  if (output.empty()) {
    std::cout << table;
  } else {
    std::string csv_text = std::string(kReportColumns) + "\n";
    for (const auto& r : rows) csv_text += report_row_csv(r) + "\n";
    write_file(output, output.size() > 4 && output.substr(output.size() - 4) == ".csv" ? csv_text : table);
    std::printf("wrote %s (%zu rows)\n", output.c_str(), rows.size());
  }
  return 0;
}

int cmd_synth(const Common& common, const std::string& dir, int steps, std::size_t min_nodes,
              std::size_t max_nodes, int shift, std::size_t local_count) {
  SyntheticConfig cfg;
  cfg.steps = steps;
  cfg.min_nodes_per_step = min_nodes;
  cfg.max_nodes_per_step = max_nodes;
  cfg.regime_shift_step = shift;
  cfg.local_count = local_count;
  cfg.seed = common.seed;
  const TemporalGraph g = synthetic_graph(cfg);
  fs::create_directories(dir);
  export_csv(g, DatasetPaths::in_directory(dir));
  std::printf("wrote %s: N=%zu E=%zu T=%d local=%zu total=%zu\n", dir.c_str(), g.node_count(),
              g.edge_count(), g.max_step(), g.local_count(), g.total_count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal transaction-graph classification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "chronoaml 0.1.0");

  DataFlags data;
  ModelFlags model;
  Common common;
  std::string set = "af", output, artifact, mode = "raw", id, reports_dir, host = "127.0.0.1",
              gcn_artifact, active_model, static_dir, synth_dir;
  int boundary = 34, port = 8080, steps = 20, shift = 0;
  bool as_json = false, recompute = false, retrain = false;
  std::optional<std::size_t> ne_hidden, ne_epochs;
  std::size_t min_nodes = 60, max_nodes = 120, synth_local = 10;
  std::vector<std::string> layout_files;

  auto* ingest_cmd = app.add_subcommand("ingest", "Load and validate the dataset, print a summary");
  data.add(ingest_cmd, "--features");
  ingest_cmd->add_flag("--json", as_json, "Print the validation report as JSON");

  auto* features_cmd = app.add_subcommand("features", "Assemble a feature matrix and export it");
  data.add(features_cmd);
  features_cmd->add_option("--set", set, "lf, af, lf+ne or af+ne")->capture_default_str();
  features_cmd->add_flag("--recompute-aggregates", recompute,
                         "Replace stored aggregates by in/out neighbor min/max/mean/std");
  features_cmd->add_option("--embedding-artifact", artifact, "GCN artifact for NE columns");
  features_cmd->add_option("--output", output, "CSV to write")->required();

  auto* train_cmd = app.add_subcommand("train", "Train one model on the training steps");
  data.add(train_cmd);
  model.add(train_cmd);
  common.add(train_cmd);
  train_cmd->add_option("--features", set, "lf or af")->capture_default_str();
  train_cmd->add_option("--boundary", boundary, "Last training time step")->capture_default_str();
  train_cmd->add_option("--output", output, "Artifact path (default <out>/artifacts/<id>.json)");

  auto* eval_cmd = app.add_subcommand("eval", "Run a temporal-split experiment and write reports");
  data.add(eval_cmd);
  model.add(eval_cmd);
  common.add(eval_cmd);
  eval_cmd->add_option("--features", set, "lf, af, lf+ne or af+ne")->capture_default_str();
  eval_cmd->add_option("--boundary", boundary, "Last training time step")->capture_default_str();
  eval_cmd->add_flag("--retrain", retrain, "Retrain before every test step on all earlier labels");
  eval_cmd->add_option("--ne-hidden", ne_hidden, "Embedding GCN hidden size (NE sets)");
  eval_cmd->add_option("--ne-epochs", ne_epochs, "Embedding GCN epochs (NE sets)");
  eval_cmd->add_option("--id", id, "Experiment id (default derived from the flags)");

  auto* embed_cmd = app.add_subcommand("embed", "Write GCN hidden-layer embeddings for every node");
  data.add(embed_cmd);
  embed_cmd->add_option("--artifact", artifact, "GCN or Skip-GCN artifact")->required();
  embed_cmd->add_option("--output", output, "CSV to write")->required();

  auto* layout_cmd = app.add_subcommand("layout", "Compute a global 2-D projection");
  data.add(layout_cmd);
  common.add(layout_cmd);
  layout_cmd->add_option("--mode", mode, "raw or gcn")
      ->check(CLI::IsMember({"raw", "gcn"}))
      ->capture_default_str();
  layout_cmd->add_option("--artifact", artifact, "GCN artifact (gcn mode)");
  layout_cmd->add_option("--output", output, "CSV to write (default <out>/layouts/<mode>.csv)");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP/JSON API");
  data.add(serve_cmd);
  common.add(serve_cmd);
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--layout", layout_files, "Precomputed layout CSV (repeatable)");
  serve_cmd->add_option("--gcn-artifact", gcn_artifact, "GCN artifact for the activation layout");
  serve_cmd->add_option("--model", active_model, "Artifact whose predictions are served");
  serve_cmd->add_option("--static", static_dir, "Directory served at /");

  auto* report_cmd = app.add_subcommand("report", "Render report JSON files as a result table");
  common.add(report_cmd);
  report_cmd->add_option("--reports", reports_dir, "Directory of report JSON (default <out>/reports)");
  report_cmd->add_option("--output", output, "Write the table (.csv for CSV) instead of printing");

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset in the CSV layout");
  common.add(synth_cmd);
  synth_cmd->add_option("--dir", synth_dir, "Output directory")->required();
  synth_cmd->add_option("--steps", steps, "Time steps")->capture_default_str();
  synth_cmd->add_option("--min-nodes", min_nodes, "Nodes per step, lower bound")->capture_default_str();
  synth_cmd->add_option("--max-nodes", max_nodes, "Nodes per step, upper bound")->capture_default_str();
  synth_cmd->add_option("--local-count", synth_local, "Local feature columns")->capture_default_str();
  synth_cmd->add_option("--shift-step", shift, "Step after which illicit behavior changes (0: none)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(data, as_json);
    if (*features_cmd) return cmd_features(data, set, recompute, artifact, output);
    if (*train_cmd) return cmd_train(data, model, common, set, boundary, output);
    if (*eval_cmd)
      return cmd_eval(data, model, common, set, boundary, retrain, ne_hidden, ne_epochs, id);
    if (*embed_cmd) return cmd_embed(data, artifact, output);
    if (*layout_cmd) return cmd_layout(data, common, mode, artifact, output);
    if (*serve_cmd)
      return cmd_serve(data, common, host, port, layout_files, gcn_artifact, active_model, static_dir);
    if (*report_cmd) return cmd_report(common, reports_dir, output);
    if (*synth_cmd) return cmd_synth(common, synth_dir, steps, min_nodes, max_nodes, shift, synth_local);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
