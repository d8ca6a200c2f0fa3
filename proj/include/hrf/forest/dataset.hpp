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

#include <span>
#include <string>
#include <vector>

namespace hrf {

enum class Task { kClassification, kRegression };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

// Row-major feature matrix in [0,1]^{rows x d} with class indices (stored as
// doubles) or real targets.
struct Dataset {
  std::vector<double> features;
  std::vector<double> targets;
  std::size_t num_features = 0;
  Task task = Task::kClassification;
  int num_classes = 2;  // 1 for regression
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t rows() const { return targets.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * num_features, num_features};
  }
  int label(std::size_t i) const { return static_cast<int>(targets[i]); }
  // Output dimension: classes for classification, 1 for regression.
  std::size_t output_dim() const { return task == Task::kClassification ? num_classes : 1; }

  void add_row(std::span<const double> x, double target);
  Dataset subset(std::span<const std::size_t> indices) const;
  // Checks bounds of features and labels; throws ValidationError.
  void validate() const;
};

}  // namespace hrf
