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

#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hrf/engine/slot_engine.hpp"
#include "hrf/nrf/nrf.hpp"
#include "hrf/poly/chebyshev.hpp"

namespace hrf {

// Slot layout shared by client and server: tree l occupies slots
// [l (2K-1), (l+1)(2K-1)). Reveals feature choices, not thresholds or weights.
struct PackingLayout {
  std::size_t trees = 0;        // L
  std::size_t leaves = 0;       // K
  std::size_t num_features = 0; // d
  std::size_t slot_count = 0;   // n
  std::vector<std::vector<int>> tau;

  std::size_t block_width() const { return 2 * leaves - 1; }
  std::size_t offset(std::size_t tree) const { return tree * block_width(); }
  std::size_t active_width() const { return trees * block_width(); }
  void validate() const;

  nlohmann::json to_json() const;
  static PackingLayout from_json(const nlohmann::json& j);
};

struct HRFModel {
  PackingLayout layout;
  SlotVector t_packed;                 // (t | 0 | t) per tree
  SlotVector b_packed;                 // (b | 0...0) per tree
  std::vector<SlotVector> diagonals;   // D_1 .. D_K
  std::vector<SlotVector> w_packed;    // one per output, (alpha_l W_c | 0...0) per tree
  std::vector<double> beta;            // sum_l alpha_l beta_c
  ChebyshevPoly activation;
  int depth_requirement = 0;
  Task task = Task::kClassification;
  int num_classes = 2;
  std::vector<std::string> class_names;

  std::size_t output_dim() const { return beta.size(); }
};

// 2 (ceil(log2 m) + 1) + 2.
int depth_requirement(int degree);

// Client side: (x_tau | 0 | x_tau) per tree, zero beyond the active width.
SlotVector pack_input(const PackingLayout& layout, std::span<const double> x);

HRFModel compile(const NRFModel& model, const EngineParams& params);

// Left rotations needed by evaluate.
std::set<std::size_t> rotation_steps(const HRFModel& hrf);
std::set<std::size_t> rotation_steps(std::size_t trees, std::size_t leaves);

// sum_i D_i * rotate(c, i - 1), with `seed` (if non-empty) added to the first
// term. K additions, K plaintext multiplications, K rotations.
CipherHandle packed_matmul(SlotEngine& engine, std::span<const SlotVector> diagonals, const CipherHandle& c,
                           std::span<const double> seed = {});

// Slot 0 of the result holds <w, c> over the first active_width slots.
CipherHandle dot_product(SlotEngine& engine, std::span<const double> w, const CipherHandle& c,
                         std::size_t active_width);

struct StageCounts {
  OpCounter layer1, activation1, layer2, activation2, layer3, output_bias;

  OpCounter total() const;
  bool operator==(const StageCounts&) const = default;
  nlohmann::json to_json() const;
  static StageCounts from_json(const nlohmann::json& j);
};

// Stage names passed to the observer: "activation1_input", "activation2_input".
using StageObserver = std::function<void(std::string_view stage, const CipherHandle&)>;

struct EvaluationResult {
  std::vector<CipherHandle> scores;  // one per output, meaningful in slot 0
  StageCounts counts;                // depth_consumed holds levels used per stage
};

EvaluationResult evaluate(SlotEngine& engine, const HRFModel& hrf, const CipherHandle& input,
                          const StageObserver& observer = {});

// Trusted mode: pack, encrypt, evaluate and decrypt in one engine.
std::vector<double> infer(SlotEngine& engine, const HRFModel& hrf, std::span<const double> x,
                          StageCounts* counts = nullptr);

// Operation counts evaluate must produce.
StageCounts complexity_report(const HRFModel& hrf);

std::string to_json(const HRFModel& hrf);
HRFModel hrf_from_json(const std::string& text);

}  // namespace hrf
