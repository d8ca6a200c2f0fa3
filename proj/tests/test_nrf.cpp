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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "hrf/bench/data.hpp"
#include "hrf/error.hpp"
#include "hrf/forest/cart.hpp"
#include "hrf/nrf/finetune.hpp"
#include "hrf/nrf/nrf.hpp"
#include "random_models.hpp"

using namespace hrf;
using namespace hrf::bench;
using namespace hrf::testing;

namespace {

// The 11-node tree used as the worked example: leaves at nodes {2,4,5,7,9,10}.
DecisionTree worked_example() {
  std::vector<TreeNode> n(11);
  n[0] = split(0, 0.5, 1, 6);
  n[1] = split(1, 0.3, 2, 3);
  n[2] = leaf({1, 0});
  n[3] = split(0, 0.2, 4, 5);
  n[4] = leaf({0, 1});
  n[5] = leaf({1, 0});
  n[6] = split(1, 0.7, 7, 8);
  n[7] = leaf({0, 1});
  n[8] = split(0, 0.9, 9, 10);
  n[9] = leaf({1, 0});
  n[10] = leaf({0, 1});
  return DecisionTree(std::move(n), 2);
}

}  // namespace

TEST_CASE("worked example tree converts to the expected matching row") {
  const auto net = convert_tree(worked_example());
  REQUIRE(net.leaves() == 6);
  REQUIRE(net.comparisons() == 5);
  // Leaf at node 4 is leaf index 1; comparisons at nodes 0,1,3 are indices 0,1,2.
  CHECK(net.v_at(1, 0) == -1.0);
  CHECK(net.v_at(1, 1) == 1.0);
  CHECK(net.v_at(1, 2) == -1.0);
  CHECK(net.v_at(1, 3) == 0.0);
  CHECK(net.v_at(1, 4) == 0.0);
  CHECK(net.b[1] == -2.5);
  CHECK(net.path_lengths[1] == 3);
  for (std::size_t j = 0; j < net.leaves(); ++j) {
    int nonzero = 0;
    for (std::size_t i = 0; i < net.comparisons(); ++i) nonzero += net.v_at(j, i) != 0.0;
    CHECK(nonzero == net.path_lengths[j]);
  }
}

TEST_CASE("stump and single leaf") {
  const DecisionTree stump({split(0, 0.5, 1, 2), leaf({3.0}), leaf({5.0})}, 1);
  const auto net = convert_tree(stump);
  CHECK(net.V == std::vector<double>{-1.0, 1.0});
  CHECK(net.b == std::vector<double>{-0.5, -0.5});
  CHECK(net.W == std::vector<double>{1.5, 2.5});

  // Zero input with t = 0.5: u = tanh(-0.5 a).
  const auto tr = trace_tree(net, std::vector<double>{0.0}, Activation::tanh(4.0));
  CHECK(tr.u[0] == doctest::Approx(std::tanh(-2.0)).epsilon(1e-15));

  const DecisionTree single({leaf({0.25, 0.75})}, 2);
  const auto s = convert_tree(single);
  CHECK(s.comparisons() == 0);
  Forest f;
  f.num_features = 3;
  f.trees = {single};
  f.weights = {1.0};
  const auto m = convert_forest(f);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto y = forward_hard(m, random_x(rng, 3));
    CHECK(y[0] == 0.25);
    CHECK(y[1] == 0.75);
  }
}

TEST_CASE("hard network reproduces the forest") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const auto forest = random_forest(rng, 1 + rng() % 12, 2 + rng() % 5, 5, 2 + static_cast<int>(rng() % 3));
    const auto model = convert_forest(forest);
    const auto normalized = normalize(model);
    for (int i = 0; i < 2000; ++i) {
      const auto x = random_x(rng, forest.num_features);
      const auto expect = forest.predict(x);
      const auto got = forward_hard(model, x);
      const auto got_n = forward_hard(normalized, x);
      REQUIRE(got.size() == expect.size());
      for (std::size_t c = 0; c < got.size(); ++c) {
        REQUIRE(std::abs(got[c] - expect[c]) <= 1e-12);
        REQUIRE(got_n[c] == got[c]);
      }
      REQUIRE(argmax(got) == forest.predict_class(x));
      for (const auto& net : model.networks) {
        const auto tr = trace_tree(net, x, Activation::hard());
        REQUIRE(std::count(tr.v.begin(), tr.v.end(), 1.0) == 1);
        REQUIRE(std::count(tr.v.begin(), tr.v.end(), -1.0) == static_cast<long>(tr.v.size()) - 1);
      }
    }
  }
}

TEST_CASE("exactness on a grid in two dimensions") {
  std::mt19937_64 rng(5);
  const auto forest = random_forest(rng, 8, 2, 6, 2);
  const auto model = convert_forest(forest);
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      const std::vector<double> x{i / 200.0, j / 200.0};
      REQUIRE(argmax(forward_hard(model, x)) == forest.predict_class(x));
    }
  }
  // Inputs that sit exactly on thresholds route right in both.
  for (const auto& tree : forest.trees) {
    for (const auto& n : tree.nodes()) {
      if (n.leaf) continue;
      std::vector<double> x{0.5, 0.5};
      x[static_cast<std::size_t>(n.feature)] = n.threshold;
      const auto a = forest.predict(x), b = forward_hard(model, x);
      for (std::size_t c = 0; c < a.size(); ++c) REQUIRE(std::abs(a[c] - b[c]) <= 1e-12);
    }
  }
}

TEST_CASE("match bounds before and after normalization") {
  const DecisionTree t({split(0, 0.5, 1, 2), leaf({1.0}), split(1, 0.5, 3, 4), leaf({2.0}), leaf({3.0})}, 1);
  const auto net = convert_tree(t);
  const auto before = preactivation_bounds(net);
  CHECK(before[1].first == -3.5);
  CHECK(before[1].second == 0.5);
  const auto after = preactivation_bounds(normalize(net));
  CHECK(after[1].first == -0.875);
  CHECK(after[1].second == 0.125);
  CHECK_THROWS_AS(normalize(normalize(net)), StateError);

  std::mt19937_64 rng(21);
  const auto model = convert_forest(random_forest(rng, 10, 4, 6, 2));
  const auto nm = normalize(model);
  for (const auto& n : model.networks) {
    const auto bounds = preactivation_bounds(n);
    for (std::size_t j = 0; j < n.leaves(); ++j) {
      if (n.padding_leaf[j]) {
        CHECK(bounds[j].first == -1.0);
        CHECK(bounds[j].second == -1.0);
        continue;
      }
      CHECK(bounds[j].first == -2.0 * n.path_lengths[j] + 0.5);
      CHECK(bounds[j].second == 0.5);
    }
  }
  const auto poly = Activation::polynomial(fit_tanh(4.0, 7));
  for (int i = 0; i < 10000; ++i) {
    const auto x = random_x(rng, 4);
    for (std::size_t l = 0; l < nm.networks.size(); ++l) {
      const auto hard_raw = trace_tree(model.networks[l], x, Activation::hard());
      for (const auto& phi : {Activation::hard(), Activation::tanh(4.0), poly}) {
        const auto tr = trace_tree(nm.networks[l], x, phi);
        for (double p : tr.pre) REQUIRE(std::abs(p) <= 1.0);
      }
      const auto hard_n = trace_tree(nm.networks[l], x, Activation::hard());
      REQUIRE(argmax(hard_n.pre) == argmax(hard_raw.pre));
      for (std::size_t j = 0; j < hard_n.pre.size(); ++j) REQUIRE((hard_n.pre[j] >= 0) == (hard_raw.pre[j] >= 0));
    }
  }
}

TEST_CASE("soft activations") {
  std::mt19937_64 rng(8);
  const auto forest = random_forest(rng, 5, 3, 4, 2);
  const auto model = convert_forest(forest, Activation::tanh(1e4));
  CHECK_THROWS_AS(forward(model, std::vector<double>{0.1, 0.2, 0.3}, Activation::polynomial(fit_tanh(4.0, 7))),
                  RangeError);
  CHECK_THROWS_AS(forward_hard(model, std::vector<double>{0.1, 0.2}), DimensionError);

  int checked = 0;
  while (checked < 1000) {
    const auto x = random_x(rng, 3);
    bool far = true;
    for (const auto& net : model.networks) {
      for (std::size_t i = 0; i < net.comparisons(); ++i) {
        far = far && std::abs(x[static_cast<std::size_t>(net.tau[i])] - net.t[i]) > 1e-2;
      }
    }
    if (!far) continue;
    ++checked;
    const auto hard = forward_hard(model, x), soft = forward_soft(model, x);
    for (std::size_t c = 0; c < hard.size(); ++c) REQUIRE(soft[c] == doctest::Approx(hard[c]).epsilon(1e-9));
  }

  // The polynomial path tracks the tanh path with per-call error at most the fit error.
  const auto p = fit_tanh(4.0, 15);
  const auto nm = normalize(model);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_x(rng, 3);
    for (const auto& net : nm.networks) {
      const auto a = trace_tree(net, x, Activation::tanh(4.0));
      const auto b = trace_tree(net, x, Activation::polynomial(p));
      for (std::size_t j = 0; j < a.u.size(); ++j) REQUIRE(std::abs(a.u[j] - b.u[j]) <= p.max_error * (1 + 1e-9));
    }
  }
}

TEST_CASE("nrf json round trip") {
  std::mt19937_64 rng(2);
  auto model = normalize(convert_forest(random_forest(rng, 4, 3, 4, 3), Activation::polynomial(fit_tanh(4.0, 7))));
  const auto back = nrf_from_json(to_json(model));
  CHECK(back.networks.size() == model.networks.size());
  for (std::size_t l = 0; l < model.networks.size(); ++l) {
    CHECK(back.networks[l].V == model.networks[l].V);
    CHECK(back.networks[l].W == model.networks[l].W);
    CHECK(back.networks[l].b == model.networks[l].b);
    CHECK(back.networks[l].padding_leaf == model.networks[l].padding_leaf);
  }
  CHECK(back.activation.kind == ActivationKind::kPolynomial);
  CHECK(back.activation.poly.coefficients == model.activation.poly.coefficients);
  const auto x = random_x(rng, 3);
  CHECK(forward_soft(back, x) == forward_soft(model, x));
  CHECK_THROWS_AS(nrf_from_json("{\"format\":\"hrf-nrf\"}"), ValidationError);
}

TEST_CASE("fine-tuning gradient matches finite differences") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double eps : {0.0, 0.1}) {
    LinearHead head;
    head.inputs = 7;
    head.outputs = 3;
    head.theta.resize(21);
    head.bias.resize(3);
    for (auto& v : head.theta) v = g(rng);
    for (auto& v : head.bias) v = g(rng);
    std::vector<double> f(5 * 7);
    for (auto& v : f) v = g(rng);
    const std::vector<int> labels{0, 2, 1, 1, 0};
    LinearHead grad;
    smoothed_cross_entropy(head, f, labels, eps, &grad);
    const double h = 1e-5;
    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = smoothed_cross_entropy(head, f, labels, eps, nullptr);
      param = saved - h;
      const double down = smoothed_cross_entropy(head, f, labels, eps, nullptr);
      param = saved;
      const double numeric = (up - down) / (2 * h);
      REQUIRE(std::abs(numeric - analytic) <= 1e-4 * std::max(1e-3, std::abs(numeric)));
    };
    for (std::size_t i = 0; i < head.theta.size(); ++i) check(head.theta[i], grad.theta[i]);
    for (std::size_t c = 0; c < head.bias.size(); ++c) check(head.bias[c], grad.bias[c]);
  }
}

TEST_CASE("dilatation sweep") {
  SyntheticSpec spec;
  spec.rows = 1500;
  const auto data = load_table(make_synthetic(spec), synthetic_schema(spec), 0.8, 2);
  ForestParams fp;
  fp.num_trees = 8;
  fp.tree.max_depth = 4;
  const Forest forest = train_forest(data.train, fp);
  const auto hard = convert_forest(forest, Activation::hard());
  auto accuracy = [&](const NRFModel& m) {
    std::size_t hit = 0;
    for (std::size_t r = 0; r < data.validation.rows(); ++r) {
      hit += argmax(forward_soft(m, data.validation.row(r))) == data.validation.label(r);
    }
    return static_cast<double>(hit) / static_cast<double>(data.validation.rows());
  };
  auto gap_to_hard = [&](const NRFModel& model) {
    double gap = 0.0;
    for (std::size_t r = 0; r < 200; ++r) {
      const auto x = data.validation.row(r);
      const auto soft = forward_soft(model, x), exact = forward_hard(hard, x);
      for (std::size_t c = 0; c < soft.size(); ++c) gap += std::abs(soft[c] - exact[c]) / 200.0;
    }
    return gap;
  };
  // The soft forest approaches the exact one only as a grows without bound.
  const double limit_gap = gap_to_hard(normalize(convert_forest(forest, Activation::tanh(1e4))));
  for (double a : {1.0, 2.0, 4.0, 8.0}) {
    const auto model = normalize(convert_forest(forest, Activation::tanh(a)));
    const double gap = gap_to_hard(model);
    CHECK(limit_gap < gap);
    const auto tuned = finetune_last_layer(model, data.train, FinetuneParams{}).model;
    const double before = accuracy(model), after = accuracy(tuned);
    MESSAGE("a = " << a << ": gap to hard " << gap << ", accuracy " << before << " -> " << after);
    CHECK(after >= before);
  }
}

TEST_CASE("fine-tuning on synthetic data") {
  SyntheticSpec spec;
  spec.rows = 2000;
  const auto data = load_table(make_synthetic(spec), synthetic_schema(spec), 0.8, 1);
  ForestParams fp;
  fp.num_trees = 10;
  fp.tree.max_depth = 5;
  fp.seed = 3;
  const Forest forest = train_forest(data.train, fp);
  const auto model = normalize(convert_forest(forest, Activation::tanh(4.0)));

  // The head reproduces the soft forward pass.
  const auto head = head_from_model(model);
  for (std::size_t r = 0; r < 20; ++r) {
    const auto z = head.logits(head_features(model, data.validation.row(r)));
    const auto y = forward_soft(model, data.validation.row(r));
    for (std::size_t c = 0; c < z.size(); ++c) CHECK(z[c] == doctest::Approx(y[c]).epsilon(1e-12));
  }

  FinetuneParams p;
  p.epochs = 1;
  p.learning_rate = 0.0;
  const auto frozen = finetune_last_layer(model, data.train, p).model;
  for (std::size_t l = 0; l < model.networks.size(); ++l) {
    for (std::size_t i = 0; i < model.networks[l].W.size(); ++i) {
      REQUIRE(std::abs(frozen.networks[l].W[i] - model.networks[l].W[i]) <= 1e-12);
    }
    for (std::size_t c = 0; c < model.networks[l].beta.size(); ++c) {
      REQUIRE(std::abs(frozen.networks[l].beta[c] - model.networks[l].beta[c]) <= 1e-12);
    }
  }

  auto accuracy = [&](const NRFModel& m) {
    std::size_t hit = 0;
    for (std::size_t r = 0; r < data.validation.rows(); ++r) {
      hit += argmax(forward_soft(m, data.validation.row(r))) == data.validation.label(r);
    }
    return static_cast<double>(hit) / static_cast<double>(data.validation.rows());
  };
  p = FinetuneParams{};
  const auto tuned = finetune_last_layer(model, data.train, p);
  CHECK(tuned.epoch_loss.size() == static_cast<std::size_t>(p.epochs));
  CHECK(tuned.epoch_loss.back() < tuned.epoch_loss.front());
  const double before = accuracy(model), after = accuracy(tuned.model);
  MESSAGE("converted " << before << " tuned " << after);
  CHECK(after >= before);
  // Deterministic given the seed.
  CHECK(finetune_last_layer(model, data.train, p).model.networks[0].W == tuned.model.networks[0].W);

  // Padding leaves give constant features; they must not inflate the weights.
  bool padded = false;
  double largest = 0.0;
  for (const auto& net : tuned.model.networks) {
    for (bool pad : net.padding_leaf) padded = padded || pad;
    for (double w : net.W) largest = std::max(largest, std::abs(w));
    for (double b : net.beta) largest = std::max(largest, std::abs(b));
  }
  CHECK(padded);
  CHECK(largest < 100.0);

  Dataset reg = data.train;
  reg.task = Task::kRegression;
  CHECK_THROWS_AS(finetune_last_layer(model, reg, p), UnsupportedTaskError);
}
