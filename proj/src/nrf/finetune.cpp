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

#include "hrf/nrf/finetune.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hrf/error.hpp"

namespace hrf {

std::vector<double> LinearHead::logits(std::span<const double> features) const {
  std::vector<double> z = bias;
  for (std::size_t c = 0; c < outputs; ++c) {
    const double* row = theta.data() + c * inputs;
    z[c] += std::inner_product(row, row + inputs, features.begin(), 0.0);
  }
  return z;
}

LinearHead head_from_model(const NRFModel& model) {
  const std::size_t k = model.leaves(), c_dim = model.output_dim();
  LinearHead head;
  head.inputs = model.networks.size() * k;
  head.outputs = c_dim;
  head.theta.assign(c_dim * head.inputs, 0.0);
  head.bias.assign(c_dim, 0.0);
  for (std::size_t l = 0; l < model.networks.size(); ++l) {
    const auto& net = model.networks[l];
    for (std::size_t c = 0; c < c_dim; ++c) {
      for (std::size_t j = 0; j < k; ++j) head.theta[c * head.inputs + l * k + j] = net.w_at(c, j);
      head.bias[c] += model.alpha[l] * net.beta[c];
    }
  }
  return head;
}

NRFModel write_back(const NRFModel& model, const LinearHead& head) {
  NRFModel out = model;
  const std::size_t k = model.leaves();
  const double alpha_sum = std::accumulate(model.alpha.begin(), model.alpha.end(), 0.0);
  const LinearHead before = head_from_model(model);
  for (std::size_t l = 0; l < out.networks.size(); ++l) {
    auto& net = out.networks[l];
    for (std::size_t c = 0; c < head.outputs; ++c) {
      for (std::size_t j = 0; j < k; ++j) net.W[c * k + j] = head.theta[c * head.inputs + l * k + j];
      net.beta[c] += (head.bias[c] - before.bias[c]) / alpha_sum;
    }
  }
  return out;
}

std::vector<double> head_features(const NRFModel& model, std::span<const double> x) {
  auto f = leaf_features(model, x, model.activation);
  const std::size_t k = model.leaves();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= model.alpha[i / k];
  return f;
}

double smoothed_cross_entropy(const LinearHead& head, std::span<const double> features,
                              std::span<const int> labels, double epsilon, LinearHead* grad) {
  const std::size_t rows = labels.size(), c_dim = head.outputs;
  if (features.size() != rows * head.inputs) throw DimensionError("loss: feature block has the wrong size");
  if (rows == 0) throw DimensionError("loss: empty batch");
  if (grad) {
    grad->inputs = head.inputs;
    grad->outputs = c_dim;
    grad->theta.assign(head.theta.size(), 0.0);
    grad->bias.assign(c_dim, 0.0);
  }
  const double off = c_dim > 1 ? epsilon / static_cast<double>(c_dim - 1) : 0.0;
  double loss = 0.0;
  std::vector<double> p(c_dim);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto f = features.subspan(r * head.inputs, head.inputs);
    const auto z = head.logits(f);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < c_dim; ++c) denom += std::exp(z[c] - zmax);
    const double log_denom = std::log(denom) + zmax;
    for (std::size_t c = 0; c < c_dim; ++c) {
      const double target = static_cast<int>(c) == labels[r] ? 1.0 - epsilon : off;
      loss -= target * (z[c] - log_denom);
      p[c] = std::exp(z[c] - log_denom) - target;
    }
    if (!grad) continue;
    for (std::size_t c = 0; c < c_dim; ++c) {
      double* g = grad->theta.data() + c * head.inputs;
      for (std::size_t i = 0; i < head.inputs; ++i) g[i] += p[c] * f[i];
      grad->bias[c] += p[c];
    }
  }
  const double inv = 1.0 / static_cast<double>(rows);
  if (grad) {
    for (auto& g : grad->theta) g *= inv;
    for (auto& g : grad->bias) g *= inv;
  }
  return loss * inv;
}

FinetuneResult finetune_last_layer(const NRFModel& model, const Dataset& train, const FinetuneParams& params) {
  if (model.task != Task::kClassification || train.task != Task::kClassification) {
    throw UnsupportedTaskError("fine-tuning supports classification only");
  }
  if (model.activation.kind == ActivationKind::kHard) {
    throw ValidationError("fine-tuning needs a soft activation");
  }
  if (params.epochs < 0 || params.batch_size == 0 || !(params.learning_rate >= 0.0) ||
      !(params.label_smoothing >= 0.0 && params.label_smoothing < 1.0)) {
    throw ConfigError("fine-tuning: invalid epochs, batch size, learning rate or smoothing");
  }
  if (train.num_features != model.num_features) throw DimensionError("fine-tuning: feature count mismatch");

  const LinearHead initial = head_from_model(model);
  const std::size_t rows = train.rows(), width = initial.inputs;
  if (rows == 0) throw DataError("fine-tuning: empty training set");

  // Cache features as float when they fit in 1 GiB, else recompute per batch.
  const bool cache = rows * width <= (std::size_t{1} << 28);
  std::vector<float> cached;
  if (cache) cached.resize(rows * width);
  std::vector<double> mean(width, 0.0), sq(width, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto f = head_features(model, train.row(r));
    for (std::size_t i = 0; i < width; ++i) {
      mean[i] += f[i];
      sq[i] += f[i] * f[i];
    }
    if (cache) std::copy(f.begin(), f.end(), cached.begin() + static_cast<std::ptrdiff_t>(r * width));
  }
  // Train on standardized features g = (f - mean) / scale. Constant features
  // (padding leaves) are frozen with their contribution folded into the bias;
  // the scale floor keeps rarely reached leaves from getting huge weights.
  constexpr double kMinScale = 1e-3;
  std::vector<double> scale(width, 0.0);
  for (std::size_t i = 0; i < width; ++i) {
    mean[i] /= static_cast<double>(rows);
    const double sd = std::sqrt(std::max(0.0, sq[i] / static_cast<double>(rows) - mean[i] * mean[i]));
    scale[i] = sd <= 1e-6 * (1.0 + std::abs(mean[i])) ? 0.0 : std::max(sd, kMinScale);
  }
  LinearHead head = initial;
  for (std::size_t c = 0; c < head.outputs; ++c) {
    for (std::size_t i = 0; i < width; ++i) {
      head.bias[c] += initial.theta[c * width + i] * mean[i];
      head.theta[c * width + i] *= scale[i];
    }
  }
  auto standardize = [&](std::span<const double> f, std::vector<double>& out) {
    for (std::size_t i = 0; i < width; ++i) out.push_back(scale[i] > 0.0 ? (f[i] - mean[i]) / scale[i] : 0.0);
  };

  const double step = params.learning_rate / static_cast<double>(width);
  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  FinetuneResult result;
  std::vector<double> batch, raw(width);
  std::vector<int> labels;
  LinearHead grad;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const double rate = step * (1.0 - static_cast<double>(epoch) / static_cast<double>(params.epochs));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < rows; start += params.batch_size) {
      const std::size_t end = std::min(rows, start + params.batch_size);
      batch.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t r = order[i];
        if (cache) {
          std::copy_n(cached.begin() + static_cast<std::ptrdiff_t>(r * width), width, raw.begin());
          standardize(raw, batch);
        } else {
          standardize(head_features(model, train.row(r)), batch);
        }
        labels.push_back(train.label(r));
      }
      total += smoothed_cross_entropy(head, batch, labels, params.label_smoothing, &grad) *
               static_cast<double>(end - start);
      for (std::size_t i = 0; i < head.theta.size(); ++i) head.theta[i] -= rate * grad.theta[i];
      for (std::size_t c = 0; c < head.bias.size(); ++c) head.bias[c] -= rate * grad.bias[c];
    }
    result.epoch_loss.push_back(total / static_cast<double>(rows));
  }

  // Undo the standardization.
  LinearHead trained = initial;
  for (std::size_t c = 0; c < head.outputs; ++c) {
    trained.bias[c] = head.bias[c];
    for (std::size_t i = 0; i < width; ++i) {
      if (scale[i] == 0.0) continue;
      trained.theta[c * width + i] = head.theta[c * width + i] / scale[i];
    }
    for (std::size_t i = 0; i < width; ++i) trained.bias[c] -= trained.theta[c * width + i] * mean[i];
  }
  result.model = write_back(model, trained);
  return result;
}

}  // namespace hrf
