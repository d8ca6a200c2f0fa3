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
#include "hrf/nrf/nrf.hpp"

namespace hrf {

// Mini-batch SGD on standardized leaf features. The step starts at
// learning_rate / (number of head inputs) and decays linearly to zero.
struct FinetuneParams {
  int epochs = 30;
  double learning_rate = 3.0;
  double label_smoothing = 0.1;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

// Joint last layer over the alpha-weighted concatenation of every tree's
// layer-2 outputs: z = theta f + bias, theta is C x (L K).
struct LinearHead {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> theta;
  std::vector<double> bias;

  std::vector<double> logits(std::span<const double> features) const;
};

LinearHead head_from_model(const NRFModel& model);
// theta_{c,(l,k)} becomes W^(l)_{c,k}; the bias change is spread over the
// trees as delta_c / sum(alpha) so the forest sum reproduces the head.
NRFModel write_back(const NRFModel& model, const LinearHead& head);

// Alpha-weighted concatenated leaf features under the model's activation.
std::vector<double> head_features(const NRFModel& model, std::span<const double> x);

// Mean smoothed softmax cross-entropy over the rows of `features` (row-major,
// head.inputs wide). Fills `grad` with d loss / d (theta, bias) if non-null.
double smoothed_cross_entropy(const LinearHead& head, std::span<const double> features,
                              std::span<const int> labels, double epsilon, LinearHead* grad);

struct FinetuneResult {
  NRFModel model;
  std::vector<double> epoch_loss;
};

FinetuneResult finetune_last_layer(const NRFModel& model, const Dataset& train, const FinetuneParams& params);

}  // namespace hrf
