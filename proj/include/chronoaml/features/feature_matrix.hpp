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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/graph/csv_io.hpp"
#include "chronoaml/graph/temporal_graph.hpp"
#include "chronoaml/numerics/dense.hpp"

namespace chronoaml {

enum class Provenance { local, aggregated, embedding };

inline const char* provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::local: return "local";
    case Provenance::aggregated: return "aggregated";
    default: return "embedding";
  }
}

// Node-aligned feature columns, each tagged with where it came from.
struct FeatureMatrix {
  DenseMatrix values;
  std::vector<Provenance> provenance;
  std::vector<std::string> names;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }

  std::size_t count(Provenance p) const noexcept {
    std::size_t n = 0;
    for (auto q : provenance) n += q == p;
    return n;
  }
};

enum class FeatureMode { LF, AF };

inline const char* feature_mode_name(FeatureMode m) noexcept { return m == FeatureMode::LF ? "LF" : "AF"; }

inline FeatureMatrix append_columns(FeatureMatrix base, const FeatureMatrix& extra) {
  if (base.rows() != extra.rows())
    throw ShapeError("append_columns: row counts differ (" + std::to_string(base.rows()) + " vs " +
                     std::to_string(extra.rows()) + ")");
  base.values = concat_columns(base.values, extra.values);
  base.provenance.insert(base.provenance.end(), extra.provenance.begin(), extra.provenance.end());
  base.names.insert(base.names.end(), extra.names.begin(), extra.names.end());
  return base;
}

inline FeatureMatrix embedding_columns(DenseMatrix embeddings) {
  FeatureMatrix m;
  m.provenance.assign(embeddings.cols(), Provenance::embedding);
  for (std::size_t j = 0; j < embeddings.cols(); ++j) m.names.push_back("ne" + std::to_string(j));
  m.values = std::move(embeddings);
  return m;
}

// LF keeps the first local_count columns, AF keeps all of them. Embeddings,
// when given, are appended after the selected features.
inline FeatureMatrix assemble(const NodeTable& table, FeatureMode mode,
                              const std::optional<DenseMatrix>& embeddings = std::nullopt) {
  const std::size_t n = table.node_ids.size();
  if (embeddings && embeddings->rows() != n)
    throw ShapeError("assemble: embedding rows " + std::to_string(embeddings->rows()) +
                     " != node count " + std::to_string(n));
  const std::size_t width = mode == FeatureMode::LF ? table.local_count : table.total_count;
  FeatureMatrix m;
  m.values = DenseMatrix(n, width);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < width; ++j) m.values(i, j) = table.features(i, j);
  for (std::size_t j = 0; j < width; ++j) {
    m.provenance.push_back(j < table.local_count ? Provenance::local : Provenance::aggregated);
    m.names.push_back(j == 0 ? "ts" : "f" + std::to_string(j + 1));
  }
  if (embeddings) m = append_columns(std::move(m), embedding_columns(*embeddings));
  return m;
}

// Header row is txId followed by provenance:name for every column.
inline void export_feature_csv(const FeatureMatrix& m, const TemporalGraph& g,
                               const std::filesystem::path& path) {
  if (m.rows() != g.node_count()) throw ShapeError("export_feature_csv: row count != node count");
  std::string out = "txId";
  for (std::size_t j = 0; j < m.cols(); ++j) {
    out += ',';
    out += provenance_name(m.provenance[j]);
    out += ':';
    out += m.names[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += std::to_string(g.node_id(i));
    for (double v : m.values.row(i)) {
      out += ',';
      csv::append_double(out, v);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << out;
}

}  // namespace chronoaml
