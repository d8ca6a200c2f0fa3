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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hrf/forest/dataset.hpp"

namespace hrf {

// Node of a binary decision tree. Internal nodes route x[feature] >= threshold
// to the right child. Inert nodes are unreachable padding added by pad_to_K.
struct TreeNode {
  bool leaf = true;
  bool inert = false;
  int feature = 0;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // leaf output, one entry per output dimension
  std::size_t samples = 0;

  bool operator==(const TreeNode&) const = default;
};

// Node 0 is the root. Comparisons and leaves are numbered in node order.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t output_dim);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t output_dim() const { return output_dim_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  std::size_t internal_count() const { return internals_.size(); }
  // Node ids of leaves / internal nodes in node order (K and K-1 entries).
  const std::vector<int>& leaves() const { return leaves_; }
  const std::vector<int>& internals() const { return internals_; }
  int depth() const;

  // Node id of the leaf reached by x.
  int route(std::span<const double> x) const;
  const std::vector<double>& predict(std::span<const double> x) const;

  // Structural checks: binary, K leaves with K - 1 internal nodes, thresholds in
  // [0,1], every live node reachable exactly once, inert nodes unreachable.
  void validate(std::size_t num_features) const;

  bool operator==(const DecisionTree&) const = default;

 private:
  void index();

  std::vector<TreeNode> nodes_;
  std::size_t output_dim_ = 1;
  std::vector<int> leaves_;
  std::vector<int> internals_;
};

// Appends inert leaves and comparisons so the tree has `target_leaves` leaves.
DecisionTree pad_to_K(const DecisionTree& tree, std::size_t target_leaves);

struct Forest {
  std::vector<DecisionTree> trees;
  std::vector<double> weights;  // alpha_l, positive
  Task task = Task::kClassification;
  int num_classes = 2;
  std::size_t num_features = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t output_dim() const { return task == Task::kClassification ? num_classes : 1; }
  std::size_t max_leaves() const;
  void validate() const;

  std::vector<double> predict(std::span<const double> x) const;
  int predict_class(std::span<const double> x) const;
};

Forest pad_forest(const Forest& forest, std::size_t target_leaves);

std::string to_json(const Forest& forest);
Forest forest_from_json(const std::string& text);

int argmax(std::span<const double> scores);

}  // namespace hrf
