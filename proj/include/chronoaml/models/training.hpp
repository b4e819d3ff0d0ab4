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
#include <vector>

#include "chronoaml/models/params.hpp"
#include "chronoaml/numerics/adam.hpp"

namespace chronoaml {

template <typename LossFn>
std::vector<double> adam_train(std::vector<DenseMatrix*> params, std::size_t epochs,
                               double learning_rate, LossFn&& loss_fn) {
  AdamState state(AdamConfig{.learning_rate = learning_rate}, params);
  std::vector<double> trace;
  trace.reserve(epochs);
  for (std::size_t e = 0; e < epochs; ++e) {
    LossAndGrads lg = loss_fn();
    trace.push_back(lg.loss);
    adam_step(params, lg.grads, state);
  }
  return trace;
}

}  // namespace chronoaml
