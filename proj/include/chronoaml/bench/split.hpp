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
#include <string>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/graph/temporal_graph.hpp"

namespace chronoaml {

struct SplitSpec {
  int boundary = 34;  // train on steps 1..boundary, test on the rest
};

struct TemporalSplit {
  std::vector<std::size_t> train;  // labeled nodes, ascending graph index
  std::vector<std::size_t> test;
};

inline void check_split(const TemporalGraph& g, SplitSpec spec) {
  if (spec.boundary < 1 || spec.boundary >= g.max_step())
    throw RangeError("split boundary " + std::to_string(spec.boundary) + " outside [1, " +
                     std::to_string(g.max_step() - 1) + "]");
}

// Membership depends only on a node's time step; unknown nodes are in neither set.
inline TemporalSplit temporal_split(const TemporalGraph& g, SplitSpec spec = {}) {
  check_split(g, spec);
  TemporalSplit s;
  const auto labels = g.labels();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!is_labeled(labels[i])) continue;
    (g.time_step(i) <= spec.boundary ? s.train : s.test).push_back(i);
  }
  return s;
}

}  // namespace chronoaml
