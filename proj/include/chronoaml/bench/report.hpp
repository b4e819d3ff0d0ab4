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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoaml/core/error.hpp"

namespace chronoaml {

// Every reports/*.json under dir, ordered by file name.
inline std::vector<nlohmann::json> load_reports(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) return {};
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<nlohmann::json> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    try {
      out.push_back(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(f.string() + ": " + e.what());
    }
  }
  return out;
}

// Fixed-width text table with the usual result columns, three decimals.
inline std::string render_table(const std::vector<nlohmann::json>& reports) {
  const std::vector<std::string> head{"Method", "Illicit Precision", "Illicit Recall", "Illicit F1",
                                      "MicroAVG F1"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    const auto& m = r.at("metrics");
    const auto& ill = m.at("illicit");
    std::vector<std::string> row{r.at("method").get<std::string>()};
    for (double v : {ill.at("precision").get<double>(), ill.at("recall").get<double>(),
                     ill.at("f1").get<double>(), m.at("micro_f1").get<double>()}) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", v);
      row.emplace_back(buf);
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string pad(width[c] - cells[c].size(), ' ');
      out += c == 0 ? cells[c] + pad : "  " + pad + cells[c];
    }
    out += '\n';
  };
  line(head);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out += std::string(total - 2, '-') + '\n';
  for (const auto& row : rows) line(row);
  return out;
}

}  // namespace chronoaml
