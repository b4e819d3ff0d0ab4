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
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "chronoaml/core/parallel.hpp"
#include "chronoaml/core/rng.hpp"
#include "chronoaml/models/params.hpp"

namespace chronoaml {

using ClassCounts = std::array<double, 2>;

inline double gini_impurity(const ClassCounts& c) noexcept {
  const double total = c[0] + c[1];
  if (total <= 0.0) return 0.0;
  const double p0 = c[0] / total, p1 = c[1] / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

// Impurity decrease of splitting parent into left and right.
inline double gini_gain(const ClassCounts& parent, const ClassCounts& left,
                        const ClassCounts& right) noexcept {
  const double total = parent[0] + parent[1];
  if (total <= 0.0) return 0.0;
  const double wl = (left[0] + left[1]) / total, wr = (right[0] + right[1]) / total;
  return gini_impurity(parent) - wl * gini_impurity(left) - wr * gini_impurity(right);
}

namespace detail {

struct SplitChoice {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DenseMatrix& x, std::span<const int> y, const ForestConfig& cfg, RngStream rng)
      : x_(x), y_(y), cfg_(cfg), rng_(rng) {
    class_weight_ = cfg.class_weighted ? ClassCounts{cfg.class_weights.licit, cfg.class_weights.illicit}
                                       : ClassCounts{1.0, 1.0};
  }

  DecisionTree build(std::vector<std::size_t> samples) {
    DecisionTree tree;
    struct Pending {
      std::int32_t node;
      std::size_t begin, end;
    };
    samples_ = std::move(samples);
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, samples_.size()}};
    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      const ClassCounts counts = count(job.begin, job.end);
      TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
      const double total = counts[0] + counts[1];
      node.distribution = {counts[0] / total, counts[1] / total};
      if (counts[0] == 0.0 || counts[1] == 0.0) continue;  // pure

      const SplitChoice split = best_split(job.begin, job.end, counts);
      if (split.feature < 0) continue;  // every feature constant here
      const auto mid = std::partition(
          samples_.begin() + static_cast<std::ptrdiff_t>(job.begin),
          samples_.begin() + static_cast<std::ptrdiff_t>(job.end), [&](std::size_t r) {
            return x_(r, static_cast<std::size_t>(split.feature)) <= split.threshold;
          });
      const auto mid_index = static_cast<std::size_t>(mid - samples_.begin());
      const auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(job.node)];
      parent.feature = split.feature;
      parent.threshold = split.threshold;
      parent.left = left;
      parent.right = left + 1;
      stack.push_back({left + 1, mid_index, job.end});
      stack.push_back({left, job.begin, mid_index});
    }
    return tree;
  }

 private:
  ClassCounts count(std::size_t begin, std::size_t end) const {
    ClassCounts c{0.0, 0.0};
    for (std::size_t k = begin; k < end; ++k) {
      const int cls = y_[samples_[k]];
      c[static_cast<std::size_t>(cls)] += class_weight_[static_cast<std::size_t>(cls)];
    }
    return c;
  }

  // Candidate features are drawn without replacement; constant features do
  // not count toward max_features.
  SplitChoice best_split(std::size_t begin, std::size_t end, const ClassCounts& parent) {
    const std::size_t f = x_.cols();
    const std::size_t budget = std::min(cfg_.max_features, f);
    std::vector<std::size_t> order(f);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitChoice best;
    std::size_t visited = 0;
    std::vector<std::pair<double, int>> column;
    column.reserve(end - begin);
    for (std::size_t drawn = 0; drawn < f && visited < budget; ++drawn) {
      const std::size_t pick = drawn + static_cast<std::size_t>(rng_.below(f - drawn));
      std::swap(order[drawn], order[pick]);
      const std::size_t feat = order[drawn];
      column.clear();
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t r = samples_[k];
        column.emplace_back(x_(r, feat), y_[r]);
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++visited;
      ClassCounts left{0.0, 0.0};
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        left[static_cast<std::size_t>(column[k].second)] +=
            class_weight_[static_cast<std::size_t>(column[k].second)];
        const double a = column[k].first, b = column[k + 1].first;
        if (a == b) continue;
        const ClassCounts right{parent[0] - left[0], parent[1] - left[1]};
        const double gain = gini_gain(parent, left, right);
        if (gain > best.gain) {
          double threshold = a + (b - a) / 2.0;
          if (!(threshold < b)) threshold = a;
          best = {static_cast<std::int32_t>(feat), threshold, gain};
        }
      }
    }
    return best;
  }

  const DenseMatrix& x_;
  std::span<const int> y_;
  const ForestConfig& cfg_;
  RngStream rng_;
  ClassCounts class_weight_{1.0, 1.0};
  std::vector<std::size_t> samples_;
};

}  // namespace detail

inline ClassCounts tree_distribution(const DecisionTree& tree, std::span<const double> row) {
  std::size_t k = 0;
  while (!tree.nodes[k].is_leaf()) {
    const TreeNode& n = tree.nodes[k];
    k = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                         : n.right);
  }
  return tree.nodes[k].distribution;
}

// Mean of the trees' leaf distributions.
inline DenseMatrix forest_predict(const ForestParams& p, const DenseMatrix& x) {
  DenseMatrix out(x.rows(), 2);
  if (p.trees.empty()) throw ConfigError("forest_predict: empty forest");
  parallel_for(x.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double a = 0.0, b = 0.0;
      for (const auto& t : p.trees) {
        const ClassCounts d = tree_distribution(t, x.row(i));
        a += d[0];
        b += d[1];
      }
      out(i, 0) = a / static_cast<double>(p.trees.size());
      out(i, 1) = b / static_cast<double>(p.trees.size());
    }
  }, 1024);
  return out;
}

// Bagged Gini trees grown to purity. Tree i draws from the stream derived
// from (seed, i), so training is identical however the trees are scheduled.
inline ModelArtifact train_random_forest(const DenseMatrix& x, std::span<const int> y,
                                         std::span<const std::size_t> mask,
                                         const ForestConfig& cfg = {}) {
  if (mask.empty()) throw ConfigError("train_random_forest: empty training mask");
  if (cfg.estimators == 0 || cfg.max_features == 0)
    throw ConfigError("train_random_forest: estimators and max_features must be positive");
  for (std::size_t i : mask)
    if (i >= y.size() || (y[i] != 0 && y[i] != 1))
      throw ConfigError("train_random_forest: mask contains an unlabeled row");
  require_finite(x, "train_random_forest");

  ForestParams params;
  params.trees.resize(cfg.estimators);
  const RngStream root(cfg.seed);
  parallel_for(cfg.estimators, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      RngStream rng = root.derive(t);
      std::vector<std::size_t> samples;
      samples.reserve(mask.size());
      if (cfg.bootstrap)
        for (std::size_t k = 0; k < mask.size(); ++k) samples.push_back(mask[rng.below(mask.size())]);
      else
        samples.assign(mask.begin(), mask.end());
      params.trees[t] = detail::TreeBuilder(x, y, cfg, rng).build(std::move(samples));
    }
  }, 1);

  ModelArtifact a;
  a.family = ModelFamily::random_forest;
  a.feature_count = x.cols();
  a.hyperparameters = cfg;
  a.seed = cfg.seed;
  a.params = std::move(params);
  return a;
}

}  // namespace chronoaml
