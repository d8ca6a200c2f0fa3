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

// Command-line front end: individual pipeline stages, a client/server split
// over serialized keys and ciphertexts, and the full benchmark.

#include <algorithm>
#include <chrono>
#include <functional>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrf/bench/pipeline.hpp"
#include "hrf/engine/key_store.hpp"
#include "hrf/util/json_fields.hpp"

namespace {

using namespace hrf;
using namespace hrf::bench;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitStage = 2;
constexpr int kExitThreshold = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
};

// "a.b.c=value"; the value is parsed as JSON and falls back to a string.
void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key.path=value, got '" + assignment + "'");
  std::string pointer = "/" + assignment.substr(0, eq);
  for (auto& ch : pointer) {
    if (ch == '.') ch = '/';
  }
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  j[json::json_pointer(pointer)] = std::move(value);
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
  json j = opts.config_path.empty() ? ExperimentConfig{}.to_json()
                                    : json_fields::parse(read_text(opts.config_path), opts.config_path);
  for (const auto& o : opts.overrides) apply_override(j, o);
  if (!opts.output_dir.empty()) j["output_dir"] = opts.output_dir;
  auto config = ExperimentConfig::from_json(j);
  config.validate();
  return config;
}

std::string in_dir(const ExperimentConfig& config, const std::string& file) {
  return (fs::path(config.output_dir) / file).string();
}

std::string or_default(const std::string& given, const ExperimentConfig& config, const std::string& file) {
  return given.empty() ? in_dir(config, file) : given;
}

void note(const std::string& what, const std::string& path) { std::cout << what << " -> " << path << "\n"; }

LoadedData load_data(const ExperimentConfig& config) {
  auto data = load_dataset(config.dataset);
  if (data.unseen_categories) {
    std::cerr << "warning: " << data.unseen_categories
              << " validation cells hold categories unseen in training\n";
  }
  return data;
}

double accuracy_of(const Dataset& data, const std::function<int(std::span<const double>)>& predict) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < data.rows(); ++r) hits += predict(data.row(r)) == data.label(r);
  return data.rows() ? static_cast<double>(hits) / static_cast<double>(data.rows()) : 0.0;
}

int argmax_of(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<double> parse_features(const std::string& text) {
  std::vector<double> x;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      x.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ConfigError("--features: '" + cell + "' is not a number");
    }
  }
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homomorphic random forest toolkit"};
  app.require_subcommand(1);
  CommonOptions common;
  app.add_option("-c,--config", common.config_path, "Experiment configuration (JSON)");
  app.add_option("-s,--set", common.overrides, "Override configuration keys, e.g. forest.num_trees=20");
  app.add_option("-o,--output-dir", common.output_dir, "Directory for artifacts");

  std::string forest_path, nrf_path, model_path, layout_path, keys_dir, input_path, output_path, report_path,
      features;
  long row = -1;
  bool assert_thresholds = false;

  auto* train = app.add_subcommand("train", "Train the random forest");
  auto* convert = app.add_subcommand("convert", "Convert a forest to a normalized neural forest");
  convert->add_option("--forest", forest_path, "Forest file (default <out>/forest.json)");
  auto* finetune = app.add_subcommand("finetune", "Fine-tune the output layer on the training split");
  finetune->add_option("--nrf", nrf_path, "Neural forest (default <out>/nrf_converted.json)");
  auto* compile_cmd = app.add_subcommand("compile", "Compile a neural forest to a packed HRF model");
  compile_cmd->add_option("--nrf", nrf_path, "Neural forest (default <out>/nrf_finetuned.json)");
  auto* keygen = app.add_subcommand("keygen", "Generate CKKS keys for a packing layout");
  keygen->add_option("--layout", layout_path, "Layout file (default <out>/layout.json)");
  keygen->add_option("--keys", keys_dir, "Key directory (default <out>/keys)");
  auto* pack = app.add_subcommand("pack", "Client: pack and encrypt one feature vector");
  pack->add_option("--layout", layout_path, "Layout file (default <out>/layout.json)");
  pack->add_option("--keys", keys_dir, "Directory holding public.key (default <out>/keys)");
  auto* pack_source = pack->add_option_group("source");
  pack_source->add_option("--row", row, "Validation row of the configured dataset");
  pack_source->add_option("--features", features, "Comma-separated features in [0,1]");
  pack_source->require_option(1);
  pack->add_option("--out", output_path, "Ciphertext file (default <out>/input.ct)");
  auto* eval = app.add_subcommand("eval", "Server: evaluate the HRF on an encrypted input");
  eval->add_option("--model", model_path, "Compiled model (default <out>/hrf_compiled.json)");
  eval->add_option("--keys", keys_dir, "Directory holding relin.key and galois.key (default <out>/keys)");
  eval->add_option("--in", input_path, "Encrypted input (default <out>/input.ct)");
  eval->add_option("--out", output_path, "Encrypted scores (default <out>/scores.ct)");
  auto* decrypt = app.add_subcommand("decrypt", "Client: decrypt class scores");
  decrypt->add_option("--keys", keys_dir, "Directory holding secret.key (default <out>/keys)");
  decrypt->add_option("--in", input_path, "Encrypted scores (default <out>/scores.ct)");
  decrypt->add_option("--model", model_path, "Compiled model, for class names (optional)");
  auto* bench_cmd = app.add_subcommand("bench", "Run the whole experiment and report");
  bench_cmd->add_flag("--assert", assert_thresholds, "Exit with status 3 when a result threshold fails");
  auto* report_cmd = app.add_subcommand("report", "Print a saved metrics report");
  report_cmd->add_option("--report", report_path, "Report file (default <out>/report.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  ExperimentConfig config;
  try {
    config = resolve_config(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (keys_dir.empty()) keys_dir = in_dir(config, "keys");

  try {
    if (*train) {
      const auto data = load_data(config);
      const auto forest = train_stage(config, data.train);
      write_text(in_dir(config, "preprocessor.json"), data.preprocessor.to_json().dump(2));
      write_text(in_dir(config, "forest.json"), to_json(forest));
      std::cout << "validation accuracy " << std::fixed << std::setprecision(4)
                << accuracy_of(data.validation, [&](auto x) { return forest.predict_class(x); }) << "\n";
      note("forest", in_dir(config, "forest.json"));
    } else if (*convert) {
      const auto forest = forest_from_json(read_text(or_default(forest_path, config, "forest.json")));
      const auto model = convert_stage(config, forest);
      write_text(in_dir(config, "nrf_converted.json"), to_json(model));
      std::cout << model.networks.size() << " trees, " << model.leaves() << " leaves per tree\n";
      note("neural forest", in_dir(config, "nrf_converted.json"));
    } else if (*finetune) {
      const auto model = nrf_from_json(read_text(or_default(nrf_path, config, "nrf_converted.json")));
      const auto data = load_data(config);
      const auto result = finetune_last_layer(model, data.train, config.finetune);
      write_text(in_dir(config, "nrf_finetuned.json"), to_json(result.model));
      std::cout << std::fixed << std::setprecision(4) << "loss " << result.epoch_loss.front() << " -> "
                << result.epoch_loss.back() << ", validation accuracy "
                << accuracy_of(data.validation, [&](auto x) { return argmax_of(forward_soft(model, x)); }) << " -> "
                << accuracy_of(data.validation, [&](auto x) { return argmax_of(forward_soft(result.model, x)); })
                << "\n";
      note("fine-tuned neural forest", in_dir(config, "nrf_finetuned.json"));
    } else if (*compile_cmd) {
      const auto model = nrf_from_json(read_text(or_default(nrf_path, config, "nrf_finetuned.json")));
      const auto hrf = compile_stage(config, model);
      write_text(in_dir(config, "hrf_compiled.json"), to_json(hrf));
      write_text(in_dir(config, "layout.json"), hrf.layout.to_json().dump(2));
      std::cout << "depth " << hrf.depth_requirement << " of " << config.engine.depth_budget << ", "
                << rotation_steps(hrf).size() << " rotation keys\n"
                << complexity_report(hrf).to_json()["total"].dump() << "\n";
      note("compiled model", in_dir(config, "hrf_compiled.json"));
      note("layout", in_dir(config, "layout.json"));
    } else if (*keygen) {
      const auto layout = PackingLayout::from_json(
          json_fields::parse(read_text(or_default(layout_path, config, "layout.json")), "layout"));
      const auto params = ckks_params(config);
      if (params.slot_count != layout.slot_count) {
        throw ConfigError("engine.slot_count " + std::to_string(params.slot_count) + " differs from the layout's " +
                          std::to_string(layout.slot_count));
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto keys =
          CkksKeyMaterial::generate(params, config.key_seed, rotation_steps(layout.trees, layout.leaves));
      save_key_material(*keys, keys_dir);
      std::cout << keys->galois.keys.size() << " rotation keys in "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
      note("keys", keys_dir);
    } else if (*pack) {
      const auto layout = PackingLayout::from_json(
          json_fields::parse(read_text(or_default(layout_path, config, "layout.json")), "layout"));
      std::vector<double> x;
      if (row >= 0) {
        const auto data = load_data(config);
        if (static_cast<std::size_t>(row) >= data.validation.rows()) {
          throw ConfigError("--row " + std::to_string(row) + " beyond " + std::to_string(data.validation.rows()) +
                            " validation rows");
        }
        const auto r = data.validation.row(static_cast<std::size_t>(row));
        x.assign(r.begin(), r.end());
        std::cout << "label " << data.validation.class_names.at(static_cast<std::size_t>(data.validation.label(static_cast<std::size_t>(row)))) << "\n";
      } else {
        x = parse_features(features);
      }
      const auto keys = load_key_material(keys_dir, kPublicKeyPart);
      CkksEngine engine(engine_params_for(*keys->context), keys);
      const auto slots = pack_input(layout, x);
      output_path = or_default(output_path, config, "input.ct");
      save_ciphertexts(output_path, engine, {engine.encode_encrypt(slots)});
      note("encrypted input", output_path);
    } else if (*eval) {
      const auto hrf = hrf_from_json(read_text(or_default(model_path, config, "hrf_compiled.json")));
      const auto keys = load_key_material(keys_dir, kEvaluationKeyParts);
      CkksEngine engine(engine_params_for(*keys->context), keys);
      const auto input = load_ciphertexts(or_default(input_path, config, "input.ct"), engine);
      if (input.size() != 1) throw FormatError("expected one input ciphertext, found " + std::to_string(input.size()));
      const auto t0 = std::chrono::steady_clock::now();
      const auto result = evaluate(engine, hrf, input.front());
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      output_path = or_default(output_path, config, "scores.ct");
      save_ciphertexts(output_path, engine, result.scores);
      std::cout << "evaluated in " << secs << " s\n" << result.counts.to_json()["total"].dump() << "\n";
      note("encrypted scores", output_path);
    } else if (*decrypt) {
      const auto keys = load_key_material(keys_dir, kSecretKeyPart);
      CkksEngine engine(engine_params_for(*keys->context), keys);
      std::vector<std::string> names;
      if (!model_path.empty()) names = hrf_from_json(read_text(model_path)).class_names;
      std::vector<double> scores;
      for (const auto& c : load_ciphertexts(or_default(input_path, config, "scores.ct"), engine)) {
        scores.push_back(engine.decrypt_decode(c)[0]);
      }
      for (std::size_t c = 0; c < scores.size(); ++c) {
        std::cout << "class " << (c < names.size() ? names[c] : std::to_string(c)) << ": " << scores[c] << "\n";
      }
      if (scores.size() == 1) {
        std::cout << "score " << scores[0] << "\n";
      } else {
        const auto best = static_cast<std::size_t>(argmax_of(scores));
        std::cout << "prediction " << (best < names.size() ? names[best] : std::to_string(best)) << "\n";
      }
    } else if (*bench_cmd) {
      const auto report = run_pipeline(config, &std::cerr);
      std::cout << report.to_table();
      if (assert_thresholds) {
        bool ok = true;
        for (const auto& c : threshold_checks(report, config.dataset.is_synthetic())) {
          std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
          ok = ok && c.passed;
        }
        if (!ok) return kExitThreshold;
      }
    } else if (*report_cmd) {
      const std::string path = or_default(report_path, config, "report.json");
      std::cout << MetricsReport::from_json(json_fields::parse(read_text(path), path)).to_table();
    }
  } catch (const PipelineError& e) {
    std::cerr << "stage '" << e.stage() << "' failed: " << e.what() << "\n";
    for (const auto& [name, path] : e.artifacts()) std::cerr << "  completed " << name << ": " << path << "\n";
    return kExitStage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
