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

#include "hrf/forest/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hrf/error.hpp"

namespace hrf {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // weighted child impurity, lower is better
};

class CartBuilder {
 public:
  CartBuilder(const Dataset& data, const CartParams& params)
      : data_(data), params_(params), rng_(params.seed), out_dim_(data.output_dim()) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return DecisionTree(std::move(nodes_), out_dim_);
  }

 private:
  // Impurity times sample count.
  double impurity(std::span<const std::size_t> rows) const {
    if (data_.task == Task::kClassification) {
      std::vector<double> counts(out_dim_, 0.0);
      for (auto r : rows) counts[static_cast<std::size_t>(data_.label(r))] += 1.0;
      const double n = static_cast<double>(rows.size());
      double g = n;
      for (double c : counts) g -= c * c / n;
      return g;
    }
    double s = 0, s2 = 0;
    for (auto r : rows) {
      s += data_.targets[r];
      s2 += data_.targets[r] * data_.targets[r];
    }
    return s2 - s * s / static_cast<double>(rows.size());
  }

  std::vector<double> leaf_value(std::span<const std::size_t> rows) const {
    std::vector<double> v(out_dim_, 0.0);
    const double n = static_cast<double>(rows.size());
    if (data_.task == Task::kClassification) {
      for (auto r : rows) v[static_cast<std::size_t>(data_.label(r))] += 1.0 / n;
    } else {
      for (auto r : rows) v[0] += data_.targets[r] / n;
    }
    return v;
  }

  std::vector<int> candidate_features() {
    const std::size_t d = data_.num_features;
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    const std::size_t k = params_.features_per_split == 0 ? d : std::min(d, params_.features_per_split);
    if (k == d) return all;
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(all[i], all[pick(rng_)]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
  }

  Split best_split(std::vector<std::size_t>& rows) {
    Split best;
    best.score = std::numeric_limits<double>::infinity();
    const std::size_t n = rows.size();
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples_leaf);
    const bool classify = data_.task == Task::kClassification;
    for (int f : candidate_features()) {
      const auto col = static_cast<std::size_t>(f);
      auto value = [&](std::size_t r) { return data_.features[r * data_.num_features + col]; };
      std::sort(rows.begin(), rows.end(), [&](auto a, auto b) { return value(a) < value(b); });
      std::vector<double> left_counts(out_dim_, 0.0), right_counts(out_dim_, 0.0);
      double ls = 0, ls2 = 0, rs = 0, rs2 = 0;
      for (auto r : rows) {
        if (classify) {
          right_counts[static_cast<std::size_t>(data_.label(r))] += 1;
        } else {
          rs += data_.targets[r];
          rs2 += data_.targets[r] * data_.targets[r];
        }
      }
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto r = rows[i];
        if (classify) {
          const auto c = static_cast<std::size_t>(data_.label(r));
          left_counts[c] += 1;
          right_counts[c] -= 1;
        } else {
          const double y = data_.targets[r];
          ls += y, ls2 += y * y, rs -= y, rs2 -= y * y;
        }
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double a = value(r), b = value(rows[i + 1]);
        if (!(a < b)) continue;
        double score;
        if (classify) {
          double gl = static_cast<double>(nl), gr = static_cast<double>(nr);
          for (std::size_t c = 0; c < out_dim_; ++c) {
            gl -= left_counts[c] * left_counts[c] / static_cast<double>(nl);
            gr -= right_counts[c] * right_counts[c] / static_cast<double>(nr);
          }
          score = gl + gr;
        } else {
          score = (ls2 - ls * ls / static_cast<double>(nl)) + (rs2 - rs * rs / static_cast<double>(nr));
        }
        if (score < best.score - 1e-12) {
          double t = 0.5 * (a + b);
          if (!(t > a)) t = b;
          best = {f, t, score};
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const double parent = impurity(rows);
    Split split;
    if (depth < params_.max_depth && parent > 1e-12 && rows.size() >= 2 * std::max<std::size_t>(1, params_.min_samples_leaf)) {
      split = best_split(rows);
    }
    if (split.feature < 0 || !(split.score < parent - 1e-12)) {
      auto& leaf = nodes_[static_cast<std::size_t>(id)];
      leaf.leaf = true;
      leaf.value = leaf_value(rows);
      leaf.samples = rows.size();
      return id;
    }
    std::vector<std::size_t> left, right;
    const auto col = static_cast<std::size_t>(split.feature);
    for (auto r : rows) {
      (data_.features[r * data_.num_features + col] >= split.threshold ? right : left).push_back(r);
    }
    {
      auto& node = nodes_[static_cast<std::size_t>(id)];
      node.leaf = false;
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.samples = rows.size();
    }
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const Dataset& data_;
  CartParams params_;
  std::mt19937_64 rng_;
  std::size_t out_dim_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree train_cart(const Dataset& data, const CartParams& params) {
  if (data.rows() == 0) throw DataError("train_cart: empty dataset");
  if (params.max_depth < 1) throw ConfigError("train_cart: max_depth must be at least 1");
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return CartBuilder(data, params).build(std::move(rows));
}

Forest train_forest(const Dataset& data, const ForestParams& params) {
  if (data.rows() == 0) throw DataError("train_forest: empty dataset");
  if (params.num_trees == 0) throw ConfigError("train_forest: num_trees must be positive");
  if (params.tree.max_depth < 1) throw ConfigError("train_forest: max_depth must be at least 1");
  Forest forest;
  forest.task = data.task;
  forest.num_classes = data.task == Task::kClassification ? data.num_classes : 1;
  forest.num_features = data.num_features;
  forest.feature_names = data.feature_names;
  forest.class_names = data.class_names;

  std::mt19937_64 rng(params.seed);
  CartParams tree_params = params.tree;
  if (tree_params.features_per_split == 0) {
    tree_params.features_per_split =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(data.num_features))));
  }
  const std::size_t n = data.rows();
  for (std::size_t l = 0; l < params.num_trees; ++l) {
    tree_params.seed = rng();
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees.push_back(CartBuilder(data, tree_params).build(std::move(rows)));
  }
  forest.weights.assign(params.num_trees, 1.0 / static_cast<double>(params.num_trees));
  return forest;
}

}  // namespace hrf
