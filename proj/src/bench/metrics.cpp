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

#include "hrf/bench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hrf/error.hpp"
#include "hrf/util/json_fields.hpp"
#include "hrf/forest/forest.hpp"

namespace hrf::bench {

nlohmann::json Metrics::to_json() const {
  return {{"accuracy", accuracy}, {"precision", precision}, {"recall", recall}, {"f1", f1}, {"rows", rows}};
}

Metrics Metrics::from_json(const nlohmann::json& j) {
  using json_fields::get;
  Metrics m;
  m.accuracy = get<double>(j, "accuracy", "metrics");
  m.precision = get<double>(j, "precision", "metrics");
  m.recall = get<double>(j, "recall", "metrics");
  m.f1 = get<double>(j, "f1", "metrics");
  m.rows = get<std::size_t>(j, "rows", "metrics");
  return m;
}

Metrics classification_metrics(std::span<const int> predicted, std::span<const int> truth, int positive) {
  if (predicted.size() != truth.size()) throw DimensionError("metrics: prediction and label counts differ");
  Metrics m;
  m.rows = truth.size();
  if (m.rows == 0) return m;
  std::size_t correct = 0, tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    correct += predicted[i] == truth[i];
    tp += predicted[i] == positive && truth[i] == positive;
    fp += predicted[i] == positive && truth[i] != positive;
    fn += predicted[i] != positive && truth[i] == positive;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.rows);
  m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

double agreement(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionError("agreement: prediction vectors differ in length");
  if (a.empty()) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

std::vector<double> LogisticModel::scores(std::span<const double> x) const {
  if (x.size() != num_features) throw DimensionError("logistic: input dimension mismatch");
  std::vector<double> z = bias;
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double* w = weights.data() + c * num_features;
    z[c] += std::inner_product(w, w + num_features, x.begin(), 0.0);
  }
  return z;
}

int LogisticModel::predict(std::span<const double> x) const { return argmax(scores(x)); }

double logistic_loss(const LogisticModel& model, const Dataset& data, double l2, LogisticModel* grad) {
  const std::size_t d = model.num_features, c_dim = model.bias.size(), rows = data.rows();
  if (rows == 0) throw DataError("logistic: empty dataset");
  if (grad) {
    *grad = model;
    std::fill(grad->weights.begin(), grad->weights.end(), 0.0);
    std::fill(grad->bias.begin(), grad->bias.end(), 0.0);
  }
  double loss = 0.0;
  std::vector<double> p(c_dim);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto x = data.row(r);
    const auto z = model.scores(x);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double v : z) denom += std::exp(v - zmax);
    const double log_denom = std::log(denom) + zmax;
    const int y = data.label(r);
    loss -= z[static_cast<std::size_t>(y)] - log_denom;
    if (!grad) continue;
    for (std::size_t c = 0; c < c_dim; ++c) {
      const double g = std::exp(z[c] - log_denom) - (static_cast<int>(c) == y ? 1.0 : 0.0);
      double* gw = grad->weights.data() + c * d;
      for (std::size_t i = 0; i < d; ++i) gw[i] += g * x[i];
      grad->bias[c] += g;
    }
  }
  const double inv = 1.0 / static_cast<double>(rows);
  double norm = 0.0;
  for (double w : model.weights) norm += w * w;
  if (grad) {
    for (std::size_t i = 0; i < grad->weights.size(); ++i) grad->weights[i] = grad->weights[i] * inv + l2 * model.weights[i];
    for (auto& g : grad->bias) g *= inv;
  }
  return loss * inv + 0.5 * l2 * norm;
}

LogisticModel train_logistic(const Dataset& train, const LogisticParams& params) {
  if (train.task != Task::kClassification) throw UnsupportedTaskError("logistic baseline needs classification data");
  if (params.epochs < 0 || !(params.learning_rate > 0.0) || !(params.l2 >= 0.0)) {
    throw ConfigError("logistic: invalid epochs, learning rate or l2");
  }
  LogisticModel model;
  model.num_features = train.num_features;
  model.num_classes = train.num_classes;
  model.weights.resize(static_cast<std::size_t>(train.num_classes) * train.num_features);
  model.bias.assign(static_cast<std::size_t>(train.num_classes), 0.0);
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> init(0.0, 1e-3);
  for (auto& w : model.weights) w = init(rng);
  LogisticModel grad;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    logistic_loss(model, train, params.l2, &grad);
    for (std::size_t i = 0; i < model.weights.size(); ++i) model.weights[i] -= params.learning_rate * grad.weights[i];
    for (std::size_t c = 0; c < model.bias.size(); ++c) model.bias[c] -= params.learning_rate * grad.bias[c];
  }
  return model;
}

}  // namespace hrf::bench
