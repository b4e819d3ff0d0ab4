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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoaml/core/error.hpp"
#include "chronoaml/graph/temporal_graph.hpp"

namespace chronoaml {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // true members of the class
  bool precision_undefined = false;  // no positive predictions
  bool recall_undefined = false;     // no true members
};

struct MetricsReport {
  ClassMetrics illicit;
  ClassMetrics licit;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

inline double f1_score(double precision, double recall) noexcept {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

inline ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
  ClassMetrics m;
  m.support = tp + fn;
  m.precision_undefined = tp + fp == 0;
  m.recall_undefined = tp + fn == 0;
  m.precision = m.precision_undefined ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = m.recall_undefined ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

// predicted and actual hold class targets (0 licit, 1 illicit) for the same
// examples in the same order.
inline MetricsReport compute_metrics(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size())
    throw ShapeError("compute_metrics: prediction and label counts differ");
  if (actual.empty()) throw ConfigError("compute_metrics: empty evaluation set");
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};  // [actual][predicted]
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if ((actual[i] != 0 && actual[i] != 1) || (predicted[i] != 0 && predicted[i] != 1))
      throw RangeError("compute_metrics: targets must be 0 or 1");
    ++confusion[actual[i]][predicted[i]];
  }
  MetricsReport r;
  r.count = actual.size();
  r.illicit = class_metrics(confusion[1][1], confusion[0][1], confusion[1][0]);
  r.licit = class_metrics(confusion[0][0], confusion[1][0], confusion[0][1]);
  const std::size_t correct = confusion[0][0] + confusion[1][1];
  const std::size_t wrong = confusion[0][1] + confusion[1][0];
  // Micro averaging pools TP/FP/FN over both classes; every error is one FP
  // and one FN, so micro precision = micro recall.
  const double micro_p = static_cast<double>(correct) / static_cast<double>(correct + wrong);
  r.micro_f1 = f1_score(micro_p, micro_p);
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.count);
  if (std::abs(r.micro_f1 - r.accuracy) > 1e-12)
    throw IntegrityError("compute_metrics: micro F1 differs from accuracy");
  return r;
}

struct StepF1 {
  int time_step = 0;
  double f1 = 0.0;
  std::size_t support_illicit = 0;
  std::size_t labeled = 0;
  bool absent = false;  // the step has no labeled nodes
  bool precision_undefined = false;
  bool recall_undefined = false;

  std::string flags() const {
    std::string f;
    const auto add = [&](const char* s) { f += f.empty() ? s : std::string("|") + s; };
    if (absent) add("absent");
    if (precision_undefined) add("no_predicted_illicit");
    if (recall_undefined) add("no_true_illicit");
    return f;
  }
};

// predicted holds one class per graph node. Only labeled nodes of each step count.
inline std::vector<StepF1> per_timestep_f1(std::span<const int> predicted, const TemporalGraph& g,
                                           std::span<const int> steps) {
  if (steps.empty()) throw ConfigError("per_timestep_f1: no steps");
  if (predicted.size() != g.node_count())
    throw ShapeError("per_timestep_f1: need one prediction per graph node");
  const auto labels = g.labels();
  std::vector<StepF1> out;
  for (int t : steps) {
    StepF1 s;
    s.time_step = t;
    std::vector<int> p, a;
    for (std::size_t v : g.step_nodes(t))
      if (is_labeled(labels[v])) {
        p.push_back(predicted[v]);
        a.push_back(target_of(labels[v]));
      }
    s.labeled = a.size();
    if (a.empty()) {
      s.absent = true;
    } else {
      const MetricsReport m = compute_metrics(p, a);
      s.f1 = m.illicit.f1;
      s.support_illicit = m.illicit.support;
      s.precision_undefined = m.illicit.precision_undefined;
      s.recall_undefined = m.illicit.recall_undefined;
    }
    out.push_back(s);
  }
  return out;
}

// Mean F1 over steps first..last that have labeled nodes; NaN when none do.
inline double mean_f1(std::span<const StepF1> series, int first, int last) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : series)
    if (!s.absent && s.time_step >= first && s.time_step <= last) {
      sum += s.f1;
      ++n;
    }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

inline nlohmann::json to_json_value(const ClassMetrics& m) {
  return {{"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"support", m.support},
          {"precision_undefined", m.precision_undefined},
          {"recall_undefined", m.recall_undefined}};
}

inline nlohmann::json to_json_value(const MetricsReport& r) {
  return {{"illicit", to_json_value(r.illicit)},
          {"licit", to_json_value(r.licit)},
          {"micro_f1", r.micro_f1},
          {"accuracy", r.accuracy},
          {"count", r.count}};
}

inline nlohmann::json to_json_value(std::span<const StepF1> series) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : series)
    out.push_back({{"time_step", s.time_step},
                   {"f1", s.absent ? nlohmann::json() : nlohmann::json(s.f1)},
                   {"support_illicit", s.support_illicit},
                   {"labeled", s.labeled},
                   {"flags", s.flags()}});
  return out;
}

}  // namespace chronoaml
