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
#include <utility>
#include <vector>

#include "hrf/forest/forest.hpp"
#include "hrf/poly/chebyshev.hpp"

namespace hrf {

enum class ActivationKind { kHard, kTanh, kPolynomial };

// phi applied after the first and second layers.
struct Activation {
  ActivationKind kind = ActivationKind::kHard;
  double a = 4.0;       // dilatation for tanh(a x)
  ChebyshevPoly poly;   // used when kind == kPolynomial

  static Activation hard() { return {}; }
  static Activation tanh(double a) { return {ActivationKind::kTanh, a, {}}; }
  static Activation polynomial(ChebyshevPoly p) { return {ActivationKind::kPolynomial, p.dilatation, std::move(p)}; }

  double operator()(double x) const;
  nlohmann::json to_json() const;
  static Activation from_json(const nlohmann::json& j);
};

std::string to_string(ActivationKind kind);

// Three-layer encoding of one tree with K leaves and K - 1 comparisons:
//   u = phi(x_tau - t),  v = phi(V u + b),  T(x) = W v + beta.
// Padding leaves have a zero V row and bias -1, so they never match.
struct TreeNetwork {
  std::vector<int> tau;             // K - 1
  std::vector<double> t;            // K - 1
  std::vector<double> V;            // K x (K - 1), row-major
  std::vector<double> b;            // K
  std::vector<double> W;            // C x K, row-major
  std::vector<double> beta;         // C
  std::vector<int> path_lengths;    // l(k'), 0 for padding leaves
  std::vector<bool> padding_leaf;   // K
  bool normalized = false;

  std::size_t leaves() const { return b.size(); }
  std::size_t comparisons() const { return t.size(); }
  std::size_t outputs() const { return beta.size(); }
  double v_at(std::size_t leaf, std::size_t comparison) const { return V[leaf * comparisons() + comparison]; }
  double w_at(std::size_t c, std::size_t leaf) const { return W[c * leaves() + leaf]; }
};

struct NRFModel {
  std::vector<TreeNetwork> networks;
  std::vector<double> alpha;
  Task task = Task::kClassification;
  int num_classes = 2;
  std::size_t num_features = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  Activation activation = Activation::tanh(4.0);

  std::size_t output_dim() const { return task == Task::kClassification ? num_classes : 1; }
  std::size_t leaves() const { return networks.empty() ? 0 : networks.front().leaves(); }
  bool normalized() const;
  void validate() const;
};

TreeNetwork convert_tree(const DecisionTree& tree);
// Converts every tree after padding all of them to the largest leaf count.
NRFModel convert_forest(const Forest& forest, Activation activation = Activation::tanh(4.0));

// Divides row k' of V and b_k' by max(1, 2 l(k')).
TreeNetwork normalize(const TreeNetwork& net);
NRFModel normalize(const NRFModel& model);

struct LayerTrace {
  std::vector<double> u;    // first-layer outputs
  std::vector<double> pre;  // second-layer pre-activations
  std::vector<double> v;    // second-layer outputs
  std::vector<double> out;  // T(x)
};

LayerTrace trace_tree(const TreeNetwork& net, std::span<const double> x, const Activation& phi);

std::vector<double> forward(const NRFModel& model, std::span<const double> x, const Activation& phi);
std::vector<double> forward_hard(const NRFModel& model, std::span<const double> x);
// Uses the model's configured activation.
std::vector<double> forward_soft(const NRFModel& model, std::span<const double> x);
// Concatenated second-layer outputs v^(1) .. v^(L).
std::vector<double> leaf_features(const NRFModel& model, std::span<const double> x, const Activation& phi);

// Symbolic extremes of each second-layer pre-activation over u in {-1,1}^(K-1).
std::vector<std::pair<double, double>> preactivation_bounds(const TreeNetwork& net);

std::string to_json(const NRFModel& model);
NRFModel nrf_from_json(const std::string& text);

}  // namespace hrf
