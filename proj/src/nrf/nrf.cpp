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

#include "hrf/nrf/nrf.hpp"

#include <algorithm>
#include <cmath>

#include "hrf/error.hpp"
#include "hrf/util/json_fields.hpp"

namespace hrf {

namespace {

constexpr int kNrfFormatVersion = 1;

double sign(double x) { return x >= 0.0 ? 1.0 : -1.0; }

}  // namespace

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kHard: return "hard";
    case ActivationKind::kTanh: return "tanh";
    case ActivationKind::kPolynomial: return "polynomial";
  }
  return "hard";
}

double Activation::operator()(double x) const {
  switch (kind) {
    case ActivationKind::kHard: return sign(x);
    case ActivationKind::kTanh: return std::tanh(a * x);
    case ActivationKind::kPolynomial: return poly(x);
  }
  return sign(x);
}

nlohmann::json Activation::to_json() const {
  nlohmann::json j{{"kind", to_string(kind)}, {"a", a}};
  if (kind == ActivationKind::kPolynomial) j["polynomial"] = poly.to_json();
  return j;
}

Activation Activation::from_json(const nlohmann::json& j) {
  using namespace json_fields;
  const auto kind = get<std::string>(j, "kind", "activation");
  Activation act;
  act.a = get_or<double>(j, "a", "activation", 4.0);
  if (kind == "hard") {
    act.kind = ActivationKind::kHard;
  } else if (kind == "tanh") {
    act.kind = ActivationKind::kTanh;
  } else if (kind == "polynomial") {
    act.kind = ActivationKind::kPolynomial;
    act.poly = ChebyshevPoly::from_json(member(j, "polynomial", "activation"));
  } else {
    throw ValidationError("activation.kind: unknown value '" + kind + "'");
  }
  return act;
}

bool NRFModel::normalized() const {
  return !networks.empty() && std::all_of(networks.begin(), networks.end(), [](const auto& n) { return n.normalized; });
}

void NRFModel::validate() const {
  if (networks.empty()) throw ValidationError("nrf: no networks");
  if (alpha.size() != networks.size()) throw ValidationError("nrf: alpha count differs from network count");
  const std::size_t k = networks.front().leaves();
  for (std::size_t l = 0; l < networks.size(); ++l) {
    const auto& n = networks[l];
    const std::string p = "networks[" + std::to_string(l) + "]";
    if (n.leaves() != k) throw ValidationError(p + ": leaf count differs from the first network");
    if (n.comparisons() + 1 != k || n.tau.size() != n.comparisons()) {
      throw ValidationError(p + ": expected K - 1 comparisons");
    }
    if (n.V.size() != k * n.comparisons()) throw ValidationError(p + ".V: wrong shape");
    if (n.outputs() != output_dim() || n.W.size() != output_dim() * k) throw ValidationError(p + ".W: wrong shape");
    if (n.path_lengths.size() != k || n.padding_leaf.size() != k) throw ValidationError(p + ": leaf metadata shape");
    for (int f : n.tau) {
      if (f < 0 || static_cast<std::size_t>(f) >= std::max<std::size_t>(1, num_features)) {
        throw ValidationError(p + ".tau: feature index out of range");
      }
    }
    for (double t : n.t) {
      if (!(t >= 0.0 && t <= 1.0)) throw ValidationError(p + ".t: threshold outside [0,1]");
    }
    if (!(alpha[l] > 0.0)) throw ValidationError(p + ": alpha must be positive");
  }
}

TreeNetwork convert_tree(const DecisionTree& tree) {
  const auto& nodes = tree.nodes();
  const std::size_t k = tree.leaf_count();
  const std::size_t m = tree.internal_count();
  if (m + 1 != k) throw ValidationError("convert_tree: tree needs K - 1 internal nodes");
  const std::size_t c_dim = tree.output_dim();
  TreeNetwork net;
  net.tau.resize(m);
  net.t.resize(m);
  net.V.assign(k * m, 0.0);
  net.b.resize(k);
  net.W.assign(c_dim * k, 0.0);
  net.beta.assign(c_dim, 0.0);
  net.path_lengths.assign(k, 0);
  net.padding_leaf.assign(k, false);

  std::vector<int> comparison_of(nodes.size(), -1), leaf_of(nodes.size(), -1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto id = static_cast<std::size_t>(tree.internals()[i]);
    comparison_of[id] = static_cast<int>(i);
    net.tau[i] = nodes[id].inert ? 0 : nodes[id].feature;
    net.t[i] = nodes[id].inert ? 0.0 : nodes[id].threshold;
  }
  for (std::size_t j = 0; j < k; ++j) leaf_of[static_cast<std::size_t>(tree.leaves()[j])] = static_cast<int>(j);

  // Walk from the root, recording the sign pattern of each path.
  struct Frame {
    int node;
    std::vector<std::pair<int, double>> path;
  };
  std::vector<Frame> stack{{0, {}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const auto& node = nodes[static_cast<std::size_t>(f.node)];
    if (node.leaf) {
      const auto j = static_cast<std::size_t>(leaf_of[static_cast<std::size_t>(f.node)]);
      for (auto [cmp, s] : f.path) net.V[j * m + static_cast<std::size_t>(cmp)] = s;
      net.path_lengths[j] = static_cast<int>(f.path.size());
      net.b[j] = -static_cast<double>(f.path.size()) + 0.5;
      continue;
    }
    const int cmp = comparison_of[static_cast<std::size_t>(f.node)];
    Frame left{node.left, f.path}, right{node.right, f.path};
    left.path.emplace_back(cmp, -1.0);
    right.path.emplace_back(cmp, 1.0);
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
  for (std::size_t j = 0; j < k; ++j) {
    const auto& leaf = nodes[static_cast<std::size_t>(tree.leaves()[j])];
    if (leaf.inert) {
      net.padding_leaf[j] = true;
      net.b[j] = -1.0;
      continue;
    }
    for (std::size_t c = 0; c < c_dim; ++c) {
      net.W[c * k + j] = 0.5 * leaf.value[c];
      net.beta[c] += 0.5 * leaf.value[c];
    }
  }
  return net;
}

NRFModel convert_forest(const Forest& forest, Activation activation) {
  forest.validate();
  const Forest padded = pad_forest(forest, forest.max_leaves());
  NRFModel model;
  for (const auto& tree : padded.trees) model.networks.push_back(convert_tree(tree));
  model.alpha = forest.weights;
  model.task = forest.task;
  model.num_classes = forest.num_classes;
  model.num_features = forest.num_features;
  model.feature_names = forest.feature_names;
  model.class_names = forest.class_names;
  model.activation = std::move(activation);
  return model;
}

TreeNetwork normalize(const TreeNetwork& net) {
  if (net.normalized) throw StateError("normalize: network is already normalized");
  TreeNetwork out = net;
  const std::size_t m = net.comparisons();
  for (std::size_t j = 0; j < net.leaves(); ++j) {
    const double divisor = std::max(1.0, 2.0 * net.path_lengths[j]);
    for (std::size_t i = 0; i < m; ++i) out.V[j * m + i] /= divisor;
    out.b[j] /= divisor;
  }
  out.normalized = true;
  return out;
}

NRFModel normalize(const NRFModel& model) {
  NRFModel out = model;
  for (auto& n : out.networks) n = normalize(n);
  return out;
}

LayerTrace trace_tree(const TreeNetwork& net, std::span<const double> x, const Activation& phi) {
  const std::size_t m = net.comparisons(), k = net.leaves();
  LayerTrace tr;
  tr.u.resize(m);
  for (std::size_t i = 0; i < m; ++i) tr.u[i] = phi(x[static_cast<std::size_t>(net.tau[i])] - net.t[i]);
  tr.pre.resize(k);
  tr.v.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = net.b[j];
    for (std::size_t i = 0; i < m; ++i) s += net.V[j * m + i] * tr.u[i];
    tr.pre[j] = s;
    tr.v[j] = phi(s);
  }
  tr.out = net.beta;
  for (std::size_t c = 0; c < net.outputs(); ++c) {
    for (std::size_t j = 0; j < k; ++j) tr.out[c] += net.W[c * k + j] * tr.v[j];
  }
  return tr;
}

std::vector<double> forward(const NRFModel& model, std::span<const double> x, const Activation& phi) {
  if (x.size() != model.num_features) {
    throw DimensionError("nrf: input has " + std::to_string(x.size()) + " features, expected " +
                         std::to_string(model.num_features));
  }
  if (phi.kind == ActivationKind::kPolynomial && !model.normalized()) {
    throw RangeError("nrf: polynomial activation requires a normalized model");
  }
  std::vector<double> y(model.output_dim(), 0.0);
  for (std::size_t l = 0; l < model.networks.size(); ++l) {
    const auto tr = trace_tree(model.networks[l], x, phi);
    for (std::size_t c = 0; c < y.size(); ++c) y[c] += model.alpha[l] * tr.out[c];
  }
  return y;
}

std::vector<double> forward_hard(const NRFModel& model, std::span<const double> x) {
  return forward(model, x, Activation::hard());
}

std::vector<double> forward_soft(const NRFModel& model, std::span<const double> x) {
  return forward(model, x, model.activation);
}

std::vector<double> leaf_features(const NRFModel& model, std::span<const double> x, const Activation& phi) {
  if (x.size() != model.num_features) throw DimensionError("nrf: input dimension mismatch");
  std::vector<double> f;
  f.reserve(model.networks.size() * model.leaves());
  for (const auto& net : model.networks) {
    const auto tr = trace_tree(net, x, phi);
    f.insert(f.end(), tr.v.begin(), tr.v.end());
  }
  return f;
}

std::vector<std::pair<double, double>> preactivation_bounds(const TreeNetwork& net) {
  const std::size_t m = net.comparisons();
  std::vector<std::pair<double, double>> out(net.leaves());
  for (std::size_t j = 0; j < net.leaves(); ++j) {
    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) mass += std::abs(net.V[j * m + i]);
    out[j] = {net.b[j] - mass, net.b[j] + mass};
  }
  return out;
}

std::string to_json(const NRFModel& model) {
  using nlohmann::json;
  json nets = json::array();
  for (const auto& n : model.networks) {
    const std::size_t k = n.leaves(), m = n.comparisons();
    json v = json::array(), w = json::array();
    for (std::size_t j = 0; j < k; ++j) v.push_back(std::vector<double>(n.V.begin() + j * m, n.V.begin() + (j + 1) * m));
    for (std::size_t c = 0; c < n.outputs(); ++c) {
      w.push_back(std::vector<double>(n.W.begin() + c * k, n.W.begin() + (c + 1) * k));
    }
    nets.push_back({{"tau", n.tau}, {"t", n.t}, {"V", v}, {"b", n.b}, {"W", w}, {"beta", n.beta},
                    {"path_lengths", n.path_lengths}, {"padding_leaf", n.padding_leaf}, {"normalized", n.normalized}});
  }
  json j{{"format", "hrf-nrf"},
         {"version", kNrfFormatVersion},
         {"task", to_string(model.task)},
         {"num_classes", model.task == Task::kClassification ? model.num_classes : 1},
         {"num_features", model.num_features},
         {"feature_names", model.feature_names},
         {"class_names", model.class_names},
         {"activation", model.activation.to_json()},
         {"alpha", model.alpha},
         {"networks", nets}};
  return j.dump(1);
}

NRFModel nrf_from_json(const std::string& text) {
  using namespace json_fields;
  const json j = parse(text, "nrf");
  if (get<std::string>(j, "format", "") != "hrf-nrf") throw ValidationError("format: expected 'hrf-nrf'");
  if (get<int>(j, "version", "") != kNrfFormatVersion) throw ValidationError("version: unsupported");
  NRFModel model;
  model.task = task_from_string(get<std::string>(j, "task", ""));
  model.num_classes = get<int>(j, "num_classes", "");
  model.num_features = get<std::size_t>(j, "num_features", "");
  model.feature_names = get_or<std::vector<std::string>>(j, "feature_names", "", {});
  model.class_names = get_or<std::vector<std::string>>(j, "class_names", "", {});
  model.activation = Activation::from_json(member(j, "activation", ""));
  model.alpha = get<std::vector<double>>(j, "alpha", "");
  const json& nets = member(j, "networks", "");
  if (!nets.is_array()) throw ValidationError("networks: expected an array");
  for (std::size_t l = 0; l < nets.size(); ++l) {
    const std::string p = "networks[" + std::to_string(l) + "]";
    TreeNetwork n;
    n.tau = get<std::vector<int>>(nets[l], "tau", p);
    n.t = get<std::vector<double>>(nets[l], "t", p);
    n.b = get<std::vector<double>>(nets[l], "b", p);
    n.beta = get<std::vector<double>>(nets[l], "beta", p);
    n.path_lengths = get<std::vector<int>>(nets[l], "path_lengths", p);
    n.padding_leaf = get<std::vector<bool>>(nets[l], "padding_leaf", p);
    n.normalized = get<bool>(nets[l], "normalized", p);
    for (const auto& row : get<std::vector<std::vector<double>>>(nets[l], "V", p)) {
      if (row.size() != n.t.size()) throw ValidationError(p + ".V: row length differs from comparison count");
      n.V.insert(n.V.end(), row.begin(), row.end());
    }
    for (const auto& row : get<std::vector<std::vector<double>>>(nets[l], "W", p)) {
      if (row.size() != n.b.size()) throw ValidationError(p + ".W: row length differs from leaf count");
      n.W.insert(n.W.end(), row.begin(), row.end());
    }
    model.networks.push_back(std::move(n));
  }
  model.validate();
  return model;
}

}  // namespace hrf
