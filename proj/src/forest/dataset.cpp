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

#include "hrf/forest/dataset.hpp"

#include <cmath>

#include "hrf/error.hpp"

namespace hrf {

std::string to_string(Task task) { return task == Task::kRegression ? "regression" : "classification"; }

Task task_from_string(const std::string& name) {
  if (name == "classification") return Task::kClassification;
  if (name == "regression") return Task::kRegression;
  throw ValidationError("task: unknown value '" + name + "'");
}

void Dataset::add_row(std::span<const double> x, double target) {
  if (x.size() != num_features) {
    throw DimensionError("dataset row has " + std::to_string(x.size()) + " features, expected " +
                         std::to_string(num_features));
  }
  features.insert(features.end(), x.begin(), x.end());
  targets.push_back(target);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out = *this;
  out.features.clear();
  out.targets.clear();
  out.features.reserve(indices.size() * num_features);
  out.targets.reserve(indices.size());
  for (auto i : indices) out.add_row(row(i), targets[i]);
  return out;
}

void Dataset::validate() const {
  if (features.size() != rows() * num_features) throw ValidationError("dataset: feature matrix shape mismatch");
  if (task == Task::kClassification && num_classes < 2) throw ValidationError("dataset: need at least 2 classes");
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double v = features[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("dataset: row " + std::to_string(i / num_features) + " feature " +
                            std::to_string(i % num_features) + " = " + std::to_string(v) + " outside [0,1]");
    }
  }
  for (std::size_t i = 0; i < rows(); ++i) {
    const double y = targets[i];
    if (task == Task::kClassification) {
      if (y != std::floor(y) || y < 0 || y >= num_classes) {
        throw ValidationError("dataset: row " + std::to_string(i) + " has invalid class label");
      }
    } else if (!std::isfinite(y)) {
      throw ValidationError("dataset: row " + std::to_string(i) + " has a non-finite target");
    }
  }
}

}  // namespace hrf
