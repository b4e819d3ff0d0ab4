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
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "chronoaml/core/error.hpp"
#include "chronoaml/core/rng.hpp"
#include "chronoaml/numerics/dense.hpp"

namespace chronoaml {

struct GradCheckOptions {
  double step = 1e-5;
  // Tensors larger than this are checked on a random coordinate subsample.
  std::size_t max_coords_per_tensor = 200;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
};

// Central differences against analytic gradients. loss() must read the
// current contents of params; each coordinate is restored after probing.
inline GradCheckResult grad_check(const std::function<double()>& loss,
                                  std::span<DenseMatrix* const> params,
                                  std::span<const DenseMatrix> analytic,
                                  GradCheckOptions opts = {}) {
  if (params.size() != analytic.size()) throw ShapeError("grad_check: tensor count mismatch");
  RngStream rng(opts.seed);
  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    require_same_shape(*params[k], analytic[k], "grad_check");
    auto p = params[k]->values();
    std::vector<std::size_t> coords(p.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > opts.max_coords_per_tensor) {
      shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opts.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t i : coords) {
      const double saved = p[i];
      // Differences use the perturbation actually representable at saved.
      p[i] = saved + opts.step;
      const double up = p[i] - saved;
      const double plus = loss();
      p[i] = saved - opts.step;
      const double down = saved - p[i];
      const double minus = loss();
      p[i] = saved;
      const double numeric = (plus - minus) / (up + down);
      const double exact = analytic[k].values()[i];
      const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-8});
      result.max_relative_error =
          std::max(result.max_relative_error, std::abs(numeric - exact) / denom);
      ++result.coordinates_checked;
    }
  }
  return result;
}

}  // namespace chronoaml
