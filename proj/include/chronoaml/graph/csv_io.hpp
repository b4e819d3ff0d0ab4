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

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/graph/temporal_graph.hpp"

namespace chronoaml {

struct IngestOptions {
  // Feature columns after txId; inferred from the first row when unset.
  std::optional<std::size_t> total_count;
  std::size_t local_count = 94;
  GraphBuildOptions build;
};

namespace csv {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

// Calls fn(line_number, line) for each non-empty line, CR stripped.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!line.empty()) fn(line_no, line);
    pos = end + 1;
  }
}

inline void split(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
  return value;
}

inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void expect_header(const std::string& file, std::size_t line_no, std::string_view line,
                          std::string_view a, std::string_view b) {
  std::vector<std::string_view> f;
  split(line, f);
  if (f.size() != 2 || trim(f[0]) != a || trim(f[1]) != b)
    throw ParseError(file, line_no,
                     "expected header '" + std::string(a) + "," + std::string(b) + "'");
}

}  // namespace csv

inline NodeTable read_features_csv(const std::filesystem::path& path, const IngestOptions& opts) {
  const std::string file = path.string();
  const std::string text = csv::read_file(path);
  NodeTable table;
  table.local_count = opts.local_count;
  std::optional<std::size_t> total = opts.total_count;
  std::vector<double> values;
  std::vector<std::string_view> fields;
  csv::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    csv::split(line, fields);
    if (!total) {
      if (fields.size() < 2) throw ParseError(file, line_no, "need txId and at least one feature");
      total = fields.size() - 1;
    }
    if (fields.size() != *total + 1)
      throw ParseError(file, line_no,
                       "expected " + std::to_string(*total + 1) + " columns, found " +
                           std::to_string(fields.size()));
    const auto id = csv::parse_number<TxId>(fields[0]);
    if (!id) throw ParseError(file, line_no, "txId is not an integer");
    table.node_ids.push_back(*id);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = csv::parse_number<double>(fields[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError(file, line_no, "column " + std::to_string(c + 1) + " is not numeric");
      values.push_back(*v);
    }
    const double ts = values[values.size() - *total];
    if (ts != static_cast<double>(static_cast<int>(ts)) || ts < 1.0)
      throw ParseError(file, line_no, "time step must be a positive integer");
    table.time_steps.push_back(static_cast<int>(ts));
  });
  table.total_count = total.value_or(0);
  if (table.local_count > table.total_count)
    throw ConfigError("local feature count " + std::to_string(table.local_count) +
                      " exceeds total feature count " + std::to_string(table.total_count));
  table.features = DenseMatrix(table.node_ids.size(), table.total_count, std::move(values));
  return table;
}

inline EdgeList read_edges_csv(const std::filesystem::path& path) {
  const std::string file = path.string();
  const std::string text = csv::read_file(path);
  EdgeList edges;
  bool header = true;
  std::vector<std::string_view> fields;
  csv::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (header) {
      csv::expect_header(file, line_no, line, "txId1", "txId2");
      header = false;
      return;
    }
    csv::split(line, fields);
    if (fields.size() != 2) throw ParseError(file, line_no, "expected 2 columns");
    const auto a = csv::parse_number<TxId>(fields[0]);
    const auto b = csv::parse_number<TxId>(fields[1]);
    if (!a || !b) throw ParseError(file, line_no, "txId is not an integer");
    edges.edges.emplace_back(*a, *b);
  });
  if (header) throw ParseError(file, 1, "missing header");
  return edges;
}

inline LabelMap read_classes_csv(const std::filesystem::path& path) {
  const std::string file = path.string();
  const std::string text = csv::read_file(path);
  LabelMap labels;
  bool header = true;
  std::vector<std::string_view> fields;
  csv::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (header) {
      csv::expect_header(file, line_no, line, "txId", "class");
      header = false;
      return;
    }
    csv::split(line, fields);
    if (fields.size() != 2) throw ParseError(file, line_no, "expected 2 columns");
    const auto id = csv::parse_number<TxId>(fields[0]);
    if (!id) throw ParseError(file, line_no, "txId is not an integer");
    const std::string_view cls = csv::trim(fields[1]);
    Label label;
    if (cls == "1")
      label = Label::illicit;
    else if (cls == "2")
      label = Label::licit;
    else if (cls == "unknown")
      label = Label::unknown;
    else
      throw ParseError(file, line_no, "class must be 1, 2 or unknown");
    labels.entries.emplace_back(*id, label);
  });
  if (header) throw ParseError(file, 1, "missing header");
  return labels;
}

inline TemporalGraph ingest(const std::filesystem::path& features_path,
                            const std::filesystem::path& edges_path,
                            const std::filesystem::path& classes_path, IngestOptions opts = {}) {
  NodeTable nodes = read_features_csv(features_path, opts);
  const EdgeList edges = read_edges_csv(edges_path);
  const LabelMap labels = read_classes_csv(classes_path);
  return TemporalGraph::build(std::move(nodes), edges, labels, opts.build);
}

struct DatasetPaths {
  std::filesystem::path features;
  std::filesystem::path edges;
  std::filesystem::path classes;

  // File names of the public release.
  static DatasetPaths in_directory(const std::filesystem::path& dir) {
    return {dir / "elliptic_txs_features.csv", dir / "elliptic_txs_edgelist.csv",
            dir / "elliptic_txs_classes.csv"};
  }
};

inline TemporalGraph ingest(const DatasetPaths& paths, IngestOptions opts = {}) {
  return ingest(paths.features, paths.edges, paths.classes, std::move(opts));
}

// Writes the graph back out in the three-file schema, nodes in index order.
inline void export_csv(const TemporalGraph& g, const DatasetPaths& paths) {
  {
    std::string out;
    const auto& f = g.features();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      out += std::to_string(g.node_id(i));
      for (double v : f.row(i)) {
        out += ',';
        csv::append_double(out, v);
      }
      out += '\n';
    }
    std::ofstream(paths.features, std::ios::binary) << out;
  }
  {
    std::string out = "txId1,txId2\n";
    for (const auto& [s, d] : g.edges())
      out += std::to_string(g.node_id(s)) + "," + std::to_string(g.node_id(d)) + "\n";
    std::ofstream(paths.edges, std::ios::binary) << out;
  }
  {
    std::string out = "txId,class\n";
    const auto labels = g.labels();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const char* cls = labels[i] == Label::illicit ? "1" : labels[i] == Label::licit ? "2" : "unknown";
      out += std::to_string(g.node_id(i)) + "," + cls + "\n";
    }
    std::ofstream(paths.classes, std::ios::binary) << out;
  }
}

}  // namespace chronoaml
