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
#include <span>
#include <vector>

#include "hrf/forest/dataset.hpp"
#include "json.hpp"

namespace hrf::bench {

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;  // of the positive class
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t rows = 0;

  nlohmann::json to_json() const;
  static Metrics from_json(const nlohmann::json& j);
};

// Precision and recall treat class `positive` as the positive label; a zero
// denominator yields 0.
Metrics classification_metrics(std::span<const int> predicted, std::span<const int> truth, int positive = 1);

// Fraction of identical predictions.
double agreement(std::span<const int> a, std::span<const int> b);

struct LogisticParams {
  double l2 = 1e-4;
  double learning_rate = 1.0;
  int epochs = 500;
  std::uint64_t seed = 1;
};

// Multinomial logistic regression: scores = weights x + bias.
struct LogisticModel {
  std::size_t num_features = 0;
  int num_classes = 2;
  std::vector<double> weights;  // C x d
  std::vector<double> bias;     // C

  std::vector<double> scores(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
};

// Mean cross-entropy plus (l2 / 2) |weights|^2. Fills `grad` when non-null.
double logistic_loss(const LogisticModel& model, const Dataset& data, double l2, LogisticModel* grad);

// Full-batch gradient descent from a small seeded initialization.
LogisticModel train_logistic(const Dataset& train, const LogisticParams& params);

}  // namespace hrf::bench
