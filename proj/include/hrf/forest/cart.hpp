/*
 * Copyright (c) 2026 The hrforest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>

#include "hrf/forest/forest.hpp"

namespace hrf {

struct CartParams {
  int max_depth = 6;
  std::size_t min_samples_leaf = 1;
  std::size_t features_per_split = 0;  // 0: all features
  std::uint64_t seed = 1;
};

struct ForestParams {
  std::size_t num_trees = 50;
  CartParams tree;
  bool bootstrap = true;
  std::uint64_t seed = 1;
};

// Greedy CART with Gini (classification) or variance (regression) splits and
// midpoint thresholds. Deterministic given the seed.
DecisionTree train_cart(const Dataset& data, const CartParams& params);

// Bagged forest with uniform weights 1/L. features_per_split == 0 selects
// round(sqrt(d)) features per split.
Forest train_forest(const Dataset& data, const ForestParams& params);

}  // namespace hrf
