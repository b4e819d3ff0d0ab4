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
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/features/feature_matrix.hpp"
#include "chronoaml/graph/csv_io.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/models/gcn.hpp"
#include "chronoaml/numerics/pca.hpp"

namespace chronoaml {

enum class LayoutMode { raw_features, gcn_activations };

inline const char* layout_mode_name(LayoutMode m) noexcept {
  return m == LayoutMode::raw_features ? "raw_features" : "gcn_activations";
}

// Short name used in URLs and file names.
inline const char* layout_key(LayoutMode m) noexcept {
  return m == LayoutMode::raw_features ? "raw" : "gcn";
}

inline LayoutMode parse_layout_mode(const std::string& s) {
  if (s == "raw" || s == "raw_features") return LayoutMode::raw_features;
  if (s == "gcn" || s == "gcn_activations") return LayoutMode::gcn_activations;
  throw ConfigError("unknown layout mode '" + s + "' (expected raw or gcn)");
}

// One (x, y) per graph node, computed over all steps at once so positions
// are comparable between steps.
struct ProjectionLayout {
  LayoutMode mode = LayoutMode::raw_features;
  std::string model;   // artifact reference in activation mode
  DenseMatrix coords;  // node_count x 2
};

// LF or AF columns, whichever width the artifact was trained on.
inline DenseMatrix features_for(const TemporalGraph& g, const ModelArtifact& a) {
  if (a.feature_count == g.total_count()) return assemble(g.node_table(), FeatureMode::AF).values;
  if (a.feature_count == g.local_count()) return assemble(g.node_table(), FeatureMode::LF).values;
  throw ConfigError("model expects " + std::to_string(a.feature_count) +
                    " features; only LF and AF models can be replayed from the graph alone");
}

inline ProjectionLayout build_layout(const TemporalGraph& g, LayoutMode mode,
                                     const ModelArtifact* gcn = nullptr,
                                     const std::string& model_ref = {}) {
  ProjectionLayout l;
  l.mode = mode;
  if (mode == LayoutMode::raw_features) {
    l.coords = pca_project(g.features());
    return l;
  }
  if (!gcn) throw ConfigError("build_layout: activation mode needs a trained GCN artifact");
  l.model = model_ref;
  l.coords = pca_project(gcn_node_logits(*gcn, g, features_for(g, *gcn)));
  return l;
}

inline void save_layout(const ProjectionLayout& l, const TemporalGraph& g,
                        const std::filesystem::path& path) {
  if (l.coords.rows() != g.node_count()) throw ShapeError("save_layout: layout does not fit graph");
  std::string out = std::string("# mode=") + layout_mode_name(l.mode) + " model=" + l.model + "\n";
  out += "txId,x,y\n";
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    out += std::to_string(g.node_id(i));
    out += ',';
    csv::append_double(out, l.coords(i, 0));
    out += ',';
    csv::append_double(out, l.coords(i, 1));
    out += '\n';
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << out;
  if (!f) throw Error("cannot write " + path.string());
}

inline ProjectionLayout load_layout(const TemporalGraph& g, const std::filesystem::path& path) {
  const std::string file = path.string();
  ProjectionLayout l;
  l.coords = DenseMatrix(g.node_count(), 2);
  std::vector<bool> seen(g.node_count(), false);
  std::vector<std::string_view> cells;
  csv::for_each_line(csv::read_file(path), [&](std::size_t line_no, std::string_view line) {
    if (line_no == 1) {
      const auto mode_at = line.find("mode="), model_at = line.find(" model=");
      if (line.substr(0, 2) != "# " || mode_at == std::string_view::npos ||
          model_at == std::string_view::npos)
        throw ParseError(file, line_no, "expected '# mode=... model=...'");
      l.mode = parse_layout_mode(std::string(line.substr(mode_at + 5, model_at - mode_at - 5)));
      l.model = std::string(line.substr(model_at + 7));
      return;
    }
    if (line_no == 2) {
      if (line != "txId,x,y") throw ParseError(file, line_no, "expected header 'txId,x,y'");
      return;
    }
    csv::split(line, cells);
    if (cells.size() != 3) throw ParseError(file, line_no, "expected 3 columns");
    const auto id = csv::parse_number<TxId>(cells[0]);
    const auto x = csv::parse_number<double>(cells[1]), y = csv::parse_number<double>(cells[2]);
    if (!id || !x || !y) throw ParseError(file, line_no, "malformed number");
    const auto idx = g.index_of(*id);
    if (!idx) throw IntegrityError(file + ": unknown txId " + std::to_string(*id));
    seen[*idx] = true;
    l.coords(*idx, 0) = *x;
    l.coords(*idx, 1) = *y;
  });
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw IntegrityError(file + ": layout does not cover every node");
  return l;
}

}  // namespace chronoaml
