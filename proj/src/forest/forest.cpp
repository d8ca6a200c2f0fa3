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

#include "hrf/forest/forest.hpp"

#include <algorithm>
#include <cmath>

#include "hrf/error.hpp"
#include "hrf/util/json_fields.hpp"

namespace hrf {

namespace {

constexpr int kForestFormatVersion = 1;

std::string node_path(std::size_t i) { return "nodes[" + std::to_string(i) + "]"; }

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t output_dim)
    : nodes_(std::move(nodes)), output_dim_(output_dim) {
  if (nodes_.empty()) throw ValidationError("tree: no nodes");
  index();
}

void DecisionTree::index() {
  leaves_.clear();
  internals_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    (nodes_[i].leaf ? leaves_ : internals_).push_back(static_cast<int>(i));
  }
}

int DecisionTree::depth() const {
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (node.leaf) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return best;
}

int DecisionTree::route(std::span<const double> x) const {
  int id = 0;
  while (!nodes_[static_cast<std::size_t>(id)].leaf) {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (static_cast<std::size_t>(node.feature) >= x.size()) {
      throw DimensionError("tree: input has " + std::to_string(x.size()) + " features, split uses feature " +
                           std::to_string(node.feature));
    }
    id = x[static_cast<std::size_t>(node.feature)] >= node.threshold ? node.right : node.left;
  }
  return id;
}

const std::vector<double>& DecisionTree::predict(std::span<const double> x) const {
  return nodes_[static_cast<std::size_t>(route(x))].value;
}

void DecisionTree::validate(std::size_t num_features) const {
  if (nodes_.empty()) throw ValidationError("tree: no nodes");
  if (nodes_[0].inert) throw ValidationError(node_path(0) + ": root cannot be inert");
  const int count = static_cast<int>(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.leaf) {
      if (n.value.size() != output_dim_) {
        throw ValidationError(node_path(i) + ".value: expected " + std::to_string(output_dim_) + " entries");
      }
      for (double v : n.value) {
        if (!std::isfinite(v)) throw ValidationError(node_path(i) + ".value: non-finite entry");
      }
      continue;
    }
    if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= std::max<std::size_t>(num_features, 1)) {
      throw ValidationError(node_path(i) + ".feature: " + std::to_string(n.feature) + " outside [0, " +
                            std::to_string(num_features) + ")");
    }
    if (!(n.threshold >= 0.0 && n.threshold <= 1.0)) {
      throw ValidationError(node_path(i) + ".threshold: " + std::to_string(n.threshold) + " outside [0,1]");
    }
    if (n.inert) continue;
    for (int child : {n.left, n.right}) {
      if (child <= 0 || child >= count || child == static_cast<int>(i)) {
        throw ValidationError(node_path(i) + ": invalid child index " + std::to_string(child));
      }
    }
  }
  std::vector<int> visits(nodes_.size(), 0);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const auto u = static_cast<std::size_t>(id);
    if (++visits[u] > 1) throw ValidationError(node_path(u) + ": reachable along two paths");
    if (nodes_[u].inert) throw ValidationError(node_path(u) + ": inert node is reachable");
    if (!nodes_[u].leaf) {
      stack.push_back(nodes_[u].left);
      stack.push_back(nodes_[u].right);
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].inert && visits[i] == 0) throw ValidationError(node_path(i) + ": unreachable node");
  }
  if (leaves_.size() != internals_.size() + 1) {
    throw ValidationError("tree: " + std::to_string(leaves_.size()) + " leaves but " +
                          std::to_string(internals_.size()) + " internal nodes");
  }
}

DecisionTree pad_to_K(const DecisionTree& tree, std::size_t target_leaves) {
  if (target_leaves < tree.leaf_count()) {
    throw ValidationError("pad_to_K: target " + std::to_string(target_leaves) + " below current leaf count " +
                          std::to_string(tree.leaf_count()));
  }
  auto nodes = tree.nodes();
  for (std::size_t i = tree.leaf_count(); i < target_leaves; ++i) {
    TreeNode comparison;
    comparison.leaf = false;
    comparison.inert = true;
    nodes.push_back(comparison);
    TreeNode leaf;
    leaf.inert = true;
    leaf.value.assign(tree.output_dim(), 0.0);
    nodes.push_back(leaf);
  }
  return DecisionTree(std::move(nodes), tree.output_dim());
}

std::size_t Forest::max_leaves() const {
  std::size_t k = 0;
  for (const auto& t : trees) k = std::max(k, t.leaf_count());
  return k;
}

void Forest::validate() const {
  if (trees.empty()) throw ValidationError("forest: no trees");
  if (weights.size() != trees.size()) throw ValidationError("forest: weight count differs from tree count");
  if (task == Task::kClassification && num_classes < 2) throw ValidationError("forest: need at least 2 classes");
  for (std::size_t l = 0; l < trees.size(); ++l) {
    if (!(weights[l] > 0.0) || !std::isfinite(weights[l])) {
      throw ValidationError("trees[" + std::to_string(l) + "].weight: must be positive");
    }
    if (trees[l].output_dim() != output_dim()) {
      throw ValidationError("trees[" + std::to_string(l) + "]: output dimension mismatch");
    }
    try {
      trees[l].validate(num_features);
    } catch (const ValidationError& e) {
      throw ValidationError("trees[" + std::to_string(l) + "]." + e.what());
    }
  }
}

std::vector<double> Forest::predict(std::span<const double> x) const {
  if (x.size() != num_features) {
    throw DimensionError("forest: input has " + std::to_string(x.size()) + " features, expected " +
                         std::to_string(num_features));
  }
  std::vector<double> out(output_dim(), 0.0);
  for (std::size_t l = 0; l < trees.size(); ++l) {
    const auto& v = trees[l].predict(x);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += weights[l] * v[c];
  }
  return out;
}

int Forest::predict_class(std::span<const double> x) const { return argmax(predict(x)); }

Forest pad_forest(const Forest& forest, std::size_t target_leaves) {
  Forest out = forest;
  for (auto& t : out.trees) t = pad_to_K(t, target_leaves);
  return out;
}

int argmax(std::span<const double> scores) {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::string to_json(const Forest& forest) {
  using nlohmann::json;
  json j;
  j["format"] = "hrf-forest";
  j["version"] = kForestFormatVersion;
  j["task"] = to_string(forest.task);
  j["num_classes"] = forest.task == Task::kClassification ? forest.num_classes : 1;
  j["num_features"] = forest.num_features;
  j["feature_names"] = forest.feature_names;
  j["class_names"] = forest.class_names;
  json trees = json::array();
  for (std::size_t l = 0; l < forest.trees.size(); ++l) {
    json nodes = json::array();
    for (const auto& n : forest.trees[l].nodes()) {
      json jn;
      if (n.leaf) {
        jn["leaf"] = true;
        jn["value"] = n.value;
      } else {
        jn["feature"] = n.feature;
        jn["threshold"] = n.threshold;
        jn["left"] = n.left;
        jn["right"] = n.right;
      }
      jn["samples"] = n.samples;
      if (n.inert) jn["inert"] = true;
      nodes.push_back(std::move(jn));
    }
    trees.push_back({{"weight", forest.weights[l]}, {"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump(1);
}

Forest forest_from_json(const std::string& text) {
  using namespace json_fields;
  const json j = parse(text, "forest");
  if (get<std::string>(j, "format", "") != "hrf-forest") throw ValidationError("format: expected 'hrf-forest'");
  const int version = get<int>(j, "version", "");
  if (version != kForestFormatVersion) throw ValidationError("version: unsupported " + std::to_string(version));
  Forest f;
  f.task = task_from_string(get<std::string>(j, "task", ""));
  f.num_classes = get<int>(j, "num_classes", "");
  f.num_features = get<std::size_t>(j, "num_features", "");
  f.feature_names = get_or<std::vector<std::string>>(j, "feature_names", "", {});
  f.class_names = get_or<std::vector<std::string>>(j, "class_names", "", {});
  const json& trees = member(j, "trees", "");
  if (!trees.is_array()) throw ValidationError("trees: expected an array");
  for (std::size_t l = 0; l < trees.size(); ++l) {
    const std::string tp = "trees[" + std::to_string(l) + "]";
    f.weights.push_back(get<double>(trees[l], "weight", tp));
    const json& nodes = member(trees[l], "nodes", tp);
    if (!nodes.is_array() || nodes.empty()) throw ValidationError(tp + ".nodes: expected a non-empty array");
    std::vector<TreeNode> parsed;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string np = tp + "." + node_path(i);
      const json& jn = nodes[i];
      TreeNode n;
      n.leaf = get_or<bool>(jn, "leaf", np, false);
      n.inert = get_or<bool>(jn, "inert", np, false);
      n.samples = get_or<std::size_t>(jn, "samples", np, 0);
      if (n.leaf) {
        n.value = get<std::vector<double>>(jn, "value", np);
      } else {
        n.feature = get<int>(jn, "feature", np);
        n.threshold = get<double>(jn, "threshold", np);
        if (!(n.threshold >= 0.0 && n.threshold <= 1.0)) {
          throw ValidationError(np + ".threshold: " + std::to_string(n.threshold) + " outside [0,1]");
        }
        if (!n.inert) {
          n.left = get<int>(jn, "left", np);
          n.right = get<int>(jn, "right", np);
        }
      }
      parsed.push_back(std::move(n));
    }
    f.trees.emplace_back(std::move(parsed), f.output_dim());
  }
  f.validate();
  return f;
}

}  // namespace hrf
