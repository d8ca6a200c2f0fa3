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

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrf/bench/data.hpp"
#include "hrf/bench/metrics.hpp"
#include "hrf/compiler/hrf.hpp"
#include "hrf/error.hpp"
#include "hrf/forest/cart.hpp"
#include "hrf/nrf/finetune.hpp"

namespace hrf::bench {

struct DatasetConfig {
  std::string name = "synthetic";
  std::string path;             // CSV; empty selects the synthetic generator
  std::string validation_path;  // optional separate validation CSV
  std::string schema_path;      // JSON schema file, unless `schema` is inline
  std::optional<Schema> schema;
  SyntheticSpec synthetic;
  double train_ratio = 0.8;
  std::uint64_t split_seed = 1;

  bool is_synthetic() const { return path.empty(); }
};

inline const std::vector<std::string>& all_variants() {
  static const std::vector<std::string> v{"linear",     "rf",            "nrf_hard", "nrf_converted",
                                          "nrf_soft",   "hrf_reference", "hrf_ckks"};
  return v;
}

struct ExperimentConfig {
  DatasetConfig dataset;
  ForestParams forest;
  double dilatation = 4.0;  // a in tanh(a x)
  int degree = 7;           // m, Chebyshev degree
  FinetuneParams finetune;
  LogisticParams logistic;
  EngineParams engine;  // backend is chosen per variant
  std::uint64_t key_seed = 1;
  std::size_t reference_rows = 0;  // 0 means every validation row
  std::size_t ckks_rows = 200;
  std::vector<std::string> variants = all_variants();
  std::string output_dir = "runs/default";

  // Unknown keys and out-of-range values raise ConfigError with the key path.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  bool wants(const std::string& variant) const;
};

ExperimentConfig load_config(const std::string& path);

struct MetricsReport {
  std::string dataset;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
  std::size_t unseen_categories = 0;
  std::vector<std::pair<std::string, Metrics>> variants;
  std::map<std::string, double> agreement;
  std::optional<double> ckks_max_abs_error;  // HRF ckks vs reference, same rows
  std::optional<double> ckks_seconds_per_inference;
  std::map<std::string, double> stage_seconds;
  std::optional<StageCounts> measured_counts;
  std::optional<StageCounts> predicted_counts;
  std::map<std::string, std::string> artifacts;

  const Metrics* find(const std::string& variant) const;
  // Timing fields are omitted when `timing` is false, which makes reports of
  // identical runs compare equal.
  nlohmann::json to_json(bool timing = true) const;
  static MetricsReport from_json(const nlohmann::json& j);
  std::string to_table() const;
};

// Raised when a stage fails; carries the stage name and completed artifacts.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what, std::map<std::string, std::string> artifacts)
      : Error(stage + ": " + what), stage_(std::move(stage)), artifacts_(std::move(artifacts)) {}
  const std::string& stage() const { return stage_; }
  const std::map<std::string, std::string>& artifacts() const { return artifacts_; }

 private:
  std::string stage_;
  std::map<std::string, std::string> artifacts_;
};

// Stage helpers shared by the pipeline and the command-line tool.
LoadedData load_dataset(const DatasetConfig& config);
Forest train_stage(const ExperimentConfig& config, const Dataset& train);
NRFModel convert_stage(const ExperimentConfig& config, const Forest& forest);
NRFModel finetune_stage(const ExperimentConfig& config, const NRFModel& model, const Dataset& train);
HRFModel compile_stage(const ExperimentConfig& config, const NRFModel& model);
EngineParams ckks_params(const ExperimentConfig& config);

// train -> convert -> normalize -> fine-tune -> compile -> evaluate(reference)
// -> evaluate(ckks). Writes artifacts and reports under config.output_dir
// unless it is empty. Progress lines go to `log` when given.
MetricsReport run_pipeline(const ExperimentConfig& config, std::ostream* log = nullptr);

struct ThresholdCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Result thresholds for a finished run. Real tabular data (Adult-style) is
// held to absolute accuracy bands; the synthetic fallback only requires that
// fine-tuning does not hurt and that the exact representations agree.
std::vector<ThresholdCheck> threshold_checks(const MetricsReport& report, bool synthetic);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace hrf::bench
