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

#include "hrf/bench/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "hrf/engine/ckks_engine.hpp"
#include "hrf/engine/reference_engine.hpp"
#include "hrf/util/json_fields.hpp"

namespace hrf::bench {

namespace {

using nlohmann::json;

// Config reader that rejects unknown keys and reports the full key path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type (" + std::string(j_.at(key).type_name()) + ")");
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  Section sub(const char* key) {
    seen_.insert(key);
    return Section(j_.contains(key) ? j_.at(key) : empty(), path_ + "." + key);
  }
  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(path_ + "." + key + ": unknown key");
    }
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::vector<int> labels_of(const Dataset& d, std::size_t rows) {
  std::vector<int> y;
  for (std::size_t r = 0; r < rows; ++r) y.push_back(d.label(r));
  return y;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!(out << text)) throw Error("cannot write '" + path + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  Section root(j, "config");
  {
    auto s = root.sub("dataset");
    s.read("name", c.dataset.name);
    s.read("path", c.dataset.path);
    s.read("validation_path", c.dataset.validation_path);
    s.read("schema_path", c.dataset.schema_path);
    if (s.has("schema")) {
      try {
        c.dataset.schema = Schema::from_json(s.raw("schema"));
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("config.dataset.") + e.what());
      }
    }
    s.read("train_ratio", c.dataset.train_ratio);
    s.read("split_seed", c.dataset.split_seed);
    auto syn = s.sub("synthetic");
    syn.read("rows", c.dataset.synthetic.rows);
    syn.read("grid", c.dataset.synthetic.grid);
    syn.read("noise_features", c.dataset.synthetic.noise_features);
    syn.read("categorical_features", c.dataset.synthetic.categorical_features);
    syn.read("seed", c.dataset.synthetic.seed);
    syn.finish();
    s.finish();
  }
  {
    auto s = root.sub("forest");
    s.read("num_trees", c.forest.num_trees);
    s.read("max_depth", c.forest.tree.max_depth);
    s.read("min_samples_leaf", c.forest.tree.min_samples_leaf);
    s.read("features_per_split", c.forest.tree.features_per_split);
    s.read("bootstrap", c.forest.bootstrap);
    s.read("seed", c.forest.seed);
    s.finish();
  }
  {
    auto s = root.sub("activation");
    s.read("a", c.dilatation);
    s.read("degree", c.degree);
    s.finish();
  }
  {
    auto s = root.sub("finetune");
    s.read("epochs", c.finetune.epochs);
    s.read("learning_rate", c.finetune.learning_rate);
    s.read("label_smoothing", c.finetune.label_smoothing);
    s.read("batch_size", c.finetune.batch_size);
    s.read("seed", c.finetune.seed);
    s.finish();
  }
  {
    auto s = root.sub("logistic");
    s.read("l2", c.logistic.l2);
    s.read("learning_rate", c.logistic.learning_rate);
    s.read("epochs", c.logistic.epochs);
    s.read("seed", c.logistic.seed);
    s.finish();
  }
  {
    auto s = root.sub("engine");
    s.read("slot_count", c.engine.slot_count);
    s.read("depth_budget", c.engine.depth_budget);
    s.read("scale_bits", c.engine.scale_bits);
    s.read("key_seed", c.key_seed);
    s.finish();
  }
  {
    auto s = root.sub("evaluation");
    s.read("reference_rows", c.reference_rows);
    s.read("ckks_rows", c.ckks_rows);
    s.read("variants", c.variants);
    s.finish();
  }
  root.read("output_dir", c.output_dir);
  root.finish();
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json ds{{"name", dataset.name},
          {"path", dataset.path},
          {"validation_path", dataset.validation_path},
          {"schema_path", dataset.schema_path},
          {"train_ratio", dataset.train_ratio},
          {"split_seed", dataset.split_seed},
          {"synthetic",
           {{"rows", dataset.synthetic.rows},
            {"grid", dataset.synthetic.grid},
            {"noise_features", dataset.synthetic.noise_features},
            {"categorical_features", dataset.synthetic.categorical_features},
            {"seed", dataset.synthetic.seed}}}};
  if (dataset.schema) ds["schema"] = dataset.schema->to_json();
  return {{"dataset", ds},
          {"forest",
           {{"num_trees", forest.num_trees},
            {"max_depth", forest.tree.max_depth},
            {"min_samples_leaf", forest.tree.min_samples_leaf},
            {"features_per_split", forest.tree.features_per_split},
            {"bootstrap", forest.bootstrap},
            {"seed", forest.seed}}},
          {"activation", {{"a", dilatation}, {"degree", degree}}},
          {"finetune",
           {{"epochs", finetune.epochs},
            {"learning_rate", finetune.learning_rate},
            {"label_smoothing", finetune.label_smoothing},
            {"batch_size", finetune.batch_size},
            {"seed", finetune.seed}}},
          {"logistic",
           {{"l2", logistic.l2},
            {"learning_rate", logistic.learning_rate},
            {"epochs", logistic.epochs},
            {"seed", logistic.seed}}},
          {"engine",
           {{"slot_count", engine.slot_count},
            {"depth_budget", engine.depth_budget},
            {"scale_bits", engine.scale_bits},
            {"key_seed", key_seed}}},
          {"evaluation", {{"reference_rows", reference_rows}, {"ckks_rows", ckks_rows}, {"variants", variants}}},
          {"output_dir", output_dir}};
}

void ExperimentConfig::validate() const {
  if (!dataset.is_synthetic() && dataset.schema_path.empty() && !dataset.schema) {
    throw ConfigError("config.dataset: a CSV dataset needs schema_path or an inline schema");
  }
  if (!(dataset.train_ratio > 0.0 && dataset.train_ratio < 1.0) && dataset.validation_path.empty()) {
    throw ConfigError("config.dataset.train_ratio: must lie in (0,1)");
  }
  if (dataset.is_synthetic() && (dataset.synthetic.rows < 10 || dataset.synthetic.grid < 1)) {
    throw ConfigError("config.dataset.synthetic: need at least 10 rows and grid >= 1");
  }
  if (forest.num_trees == 0) throw ConfigError("config.forest.num_trees: must be positive");
  if (forest.tree.max_depth < 1) throw ConfigError("config.forest.max_depth: must be at least 1");
  if (forest.tree.min_samples_leaf == 0) throw ConfigError("config.forest.min_samples_leaf: must be positive");
  if (!(dilatation > 0.0)) throw ConfigError("config.activation.a: must be positive");
  if (degree < 1 || degree % 2 == 0) throw ConfigError("config.activation.degree: must be odd and positive");
  if (finetune.epochs < 0) throw ConfigError("config.finetune.epochs: must be non-negative");
  if (!(finetune.learning_rate >= 0.0)) throw ConfigError("config.finetune.learning_rate: must be non-negative");
  if (!(finetune.label_smoothing >= 0.0 && finetune.label_smoothing < 1.0)) {
    throw ConfigError("config.finetune.label_smoothing: must lie in [0,1)");
  }
  if (finetune.batch_size == 0) throw ConfigError("config.finetune.batch_size: must be positive");
  if (logistic.epochs < 0 || !(logistic.learning_rate > 0.0) || !(logistic.l2 >= 0.0)) {
    throw ConfigError("config.logistic: invalid epochs, learning_rate or l2");
  }
  try {
    engine.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config.engine: ") + e.what());
  }
  for (const auto& v : variants) {
    if (std::find(all_variants().begin(), all_variants().end(), v) == all_variants().end()) {
      throw ConfigError("config.evaluation.variants: unknown variant '" + v + "'");
    }
  }
}

bool ExperimentConfig::wants(const std::string& variant) const {
  return std::find(variants.begin(), variants.end(), variant) != variants.end();
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_text(path);
  json j;
  try {
    j = json_fields::parse(text, path);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return ExperimentConfig::from_json(j);
}

const Metrics* MetricsReport::find(const std::string& variant) const {
  for (const auto& [name, m] : variants) {
    if (name == variant) return &m;
  }
  return nullptr;
}

json MetricsReport::to_json(bool timing) const {
  json vars = json::object();
  for (const auto& [name, m] : variants) vars[name] = m.to_json();
  json j{{"dataset", dataset},
         {"train_rows", train_rows},
         {"validation_rows", validation_rows},
         {"unseen_categories", unseen_categories},
         {"variants", vars},
         {"agreement", agreement},
         {"artifacts", artifacts}};
  if (ckks_max_abs_error) j["ckks_max_abs_error"] = *ckks_max_abs_error;
  if (measured_counts) j["measured_counts"] = measured_counts->to_json();
  if (predicted_counts) j["predicted_counts"] = predicted_counts->to_json();
  if (timing) {
    j["stage_seconds"] = stage_seconds;
    if (ckks_seconds_per_inference) j["ckks_seconds_per_inference"] = *ckks_seconds_per_inference;
  }
  return j;
}

MetricsReport MetricsReport::from_json(const json& j) {
  using json_fields::get;
  using json_fields::get_or;
  MetricsReport r;
  r.dataset = get<std::string>(j, "dataset", "report");
  r.train_rows = get<std::size_t>(j, "train_rows", "report");
  r.validation_rows = get<std::size_t>(j, "validation_rows", "report");
  r.unseen_categories = get_or<std::size_t>(j, "unseen_categories", "report", 0);
  // Variant rows follow the canonical order, then any others by name.
  const auto& vars = json_fields::member(j, "variants", "report");
  if (!vars.is_object()) throw ValidationError("report.variants: expected an object");
  for (const auto& name : all_variants()) {
    if (vars.contains(name)) r.variants.emplace_back(name, Metrics::from_json(vars.at(name)));
  }
  for (auto it = vars.begin(); it != vars.end(); ++it) {
    if (!r.find(it.key())) r.variants.emplace_back(it.key(), Metrics::from_json(it.value()));
  }
  r.agreement = get_or<std::map<std::string, double>>(j, "agreement", "report", {});
  r.artifacts = get_or<std::map<std::string, std::string>>(j, "artifacts", "report", {});
  r.stage_seconds = get_or<std::map<std::string, double>>(j, "stage_seconds", "report", {});
  if (j.contains("ckks_max_abs_error")) r.ckks_max_abs_error = get<double>(j, "ckks_max_abs_error", "report");
  if (j.contains("ckks_seconds_per_inference")) {
    r.ckks_seconds_per_inference = get<double>(j, "ckks_seconds_per_inference", "report");
  }
  if (j.contains("measured_counts")) r.measured_counts = StageCounts::from_json(j.at("measured_counts"));
  if (j.contains("predicted_counts")) r.predicted_counts = StageCounts::from_json(j.at("predicted_counts"));
  return r;
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  out << "dataset " << dataset << ": " << train_rows << " train rows, " << validation_rows << " validation rows";
  if (unseen_categories) out << ", " << unseen_categories << " unseen categorical values";
  out << "\n\n";
  out << std::left << std::setw(16) << "variant" << std::right << std::setw(7) << "rows" << std::setw(10) << "accuracy"
      << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(8) << "f1" << "\n";
  for (const auto& [name, m] : variants) {
    out << std::left << std::setw(16) << name << std::right << std::setw(7) << m.rows << std::setw(10)
        << fmt(m.accuracy) << std::setw(11) << fmt(m.precision) << std::setw(9) << fmt(m.recall) << std::setw(8)
        << fmt(m.f1) << "\n";
  }
  if (!agreement.empty()) {
    out << "\nagreement\n";
    for (const auto& [name, rate] : agreement) out << "  " << std::left << std::setw(30) << name << fmt(rate) << "\n";
  }
  if (ckks_max_abs_error) out << "\nckks vs reference max |score difference|: " << *ckks_max_abs_error << "\n";
  if (ckks_seconds_per_inference) out << "ckks seconds per inference: " << fmt(*ckks_seconds_per_inference, 2) << "\n";
  if (measured_counts) {
    const auto row = [&](const char* name, const OpCounter& c) {
      out << "  " << std::left << std::setw(13) << name << std::right << std::setw(6) << c.additions << std::setw(6)
          << c.plain_multiplications << std::setw(6) << c.cipher_multiplications << std::setw(6) << c.rotations
          << std::setw(7) << c.depth_consumed << "\n";
    };
    out << "\noperation counts (add, pmul, cmul, rot, levels)"
        << (predicted_counts && *predicted_counts == *measured_counts ? ", equal to the prediction" : "") << "\n";
    row("layer1", measured_counts->layer1);
    row("activation1", measured_counts->activation1);
    row("layer2", measured_counts->layer2);
    row("activation2", measured_counts->activation2);
    row("layer3", measured_counts->layer3);
    row("output_bias", measured_counts->output_bias);
    row("total", measured_counts->total());
  }
  if (!stage_seconds.empty()) {
    out << "\nstage seconds\n";
    for (const auto& [name, s] : stage_seconds) out << "  " << std::left << std::setw(20) << name << fmt(s, 2) << "\n";
  }
  return out.str();
}

LoadedData load_dataset(const DatasetConfig& config) {
  if (config.is_synthetic()) {
    return load_table(make_synthetic(config.synthetic), synthetic_schema(config.synthetic), config.train_ratio,
                      config.split_seed);
  }
  Schema schema;
  if (config.schema) {
    schema = *config.schema;
  } else {
    try {
      schema = Schema::from_json(json_fields::parse(read_text(config.schema_path), config.schema_path));
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  }
  return load_csv(config.path, schema, config.train_ratio, config.split_seed, config.validation_path);
}

Forest train_stage(const ExperimentConfig& config, const Dataset& train) { return train_forest(train, config.forest); }

NRFModel convert_stage(const ExperimentConfig& config, const Forest& forest) {
  return normalize(convert_forest(forest, Activation::tanh(config.dilatation)));
}

NRFModel finetune_stage(const ExperimentConfig& config, const NRFModel& model, const Dataset& train) {
  return finetune_last_layer(model, train, config.finetune).model;
}

HRFModel compile_stage(const ExperimentConfig& config, const NRFModel& model) {
  NRFModel poly = model;
  poly.activation = Activation::polynomial(fit_tanh(config.dilatation, config.degree));
  return compile(poly, config.engine);
}

EngineParams ckks_params(const ExperimentConfig& config) {
  EngineParams p = config.engine;
  p.backend = Backend::kCkks;
  return p;
}

std::vector<ThresholdCheck> threshold_checks(const MetricsReport& report, bool synthetic) {
  std::vector<ThresholdCheck> checks;
  const auto accuracy = [&](const std::string& variant) -> std::optional<double> {
    if (const Metrics* m = report.find(variant)) return m->accuracy;
    return std::nullopt;
  };
  const auto rate = [&](const std::string& key) -> std::optional<double> {
    auto it = report.agreement.find(key);
    if (it == report.agreement.end()) return std::nullopt;
    return it->second;
  };
  const auto check = [&](std::string name, std::optional<double> value, double floor, const std::string& what) {
    ThresholdCheck c{std::move(name), false, what + " missing from the report"};
    if (value) {
      c.passed = *value >= floor;
      c.detail = what + " = " + fmt(*value) + (c.passed ? " >= " : " < ") + fmt(floor);
    }
    checks.push_back(std::move(c));
  };
  const auto rf = accuracy("rf");
  const auto nrf = accuracy("nrf_soft");
  if (synthetic) {
    const auto converted = accuracy("nrf_converted");
    check("finetune_not_worse", nrf, converted.value_or(2.0), "fine-tuned NRF accuracy");
    if (!converted) checks.back().detail = "nrf_converted missing from the report";
    check("nrf_hard_equals_rf", rate("rf_vs_nrf_hard"), 1.0, "RF / hard NRF agreement");
    if (report.agreement.count("nrf_poly_vs_hrf_reference")) {
      check("hrf_reference_equals_nrf_poly", rate("nrf_poly_vs_hrf_reference"), 1.0,
            "polynomial NRF / HRF reference agreement");
    }
    return checks;
  }
  check("rf_accuracy", rf, 0.82, "RF accuracy");
  check("nrf_accuracy", nrf, 0.83, "fine-tuned NRF accuracy");
  check("nrf_close_to_rf", nrf, rf.value_or(2.0) - 0.005, "fine-tuned NRF accuracy vs RF - 0.005");
  if (!rf) checks.back().detail = "rf missing from the report";
  check("nrf_hrf_ckks_agreement", rate("nrf_soft_vs_hrf_ckks"), 0.95, "NRF / HRF-ckks agreement");
  return checks;
}

MetricsReport run_pipeline(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  MetricsReport report;
  report.dataset = config.dataset.name;
  const bool persist = !config.output_dir.empty();
  const auto out_path = [&](const std::string& file) { return (std::filesystem::path(config.output_dir) / file).string(); };
  const auto save = [&](const std::string& key, const std::string& file, const std::string& text) {
    if (!persist) return;
    write_text(out_path(file), text);
    report.artifacts[key] = out_path(file);
  };
  const auto say = [&](const std::string& msg) {
    if (log) *log << "[pipeline] " << msg << std::endl;
  };
  // Runs one stage, recording its time and converting failures.
  const auto stage = [&](const std::string& name, auto&& f) {
    say(name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      f();
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what(), report.artifacts);
    }
    report.stage_seconds[name] = seconds_since(t0);
  };

  LoadedData data;
  stage("load", [&] {
    data = load_dataset(config.dataset);
    save("config", "config.json", config.to_json().dump(2));
    save("preprocessor", "preprocessor.json", data.preprocessor.to_json().dump(2));
  });
  report.train_rows = data.train.rows();
  report.validation_rows = data.validation.rows();
  report.unseen_categories = data.unseen_categories;
  if (data.train.task != Task::kClassification) {
    throw PipelineError("load", "the experiment pipeline needs a classification dataset", report.artifacts);
  }
  const Dataset& val = data.validation;
  const std::size_t n_val = val.rows();
  const auto truth = labels_of(val, n_val);
  const auto record = [&](const std::string& name, const std::vector<int>& pred) {
    if (config.wants(name)) {
      const std::vector<int> t(truth.begin(), truth.begin() + static_cast<std::ptrdiff_t>(pred.size()));
      report.variants.emplace_back(name, classification_metrics(pred, t));
    }
  };

  if (config.wants("linear")) {
    stage("linear", [&] {
      const auto model = train_logistic(data.train, config.logistic);
      std::vector<int> pred;
      for (std::size_t r = 0; r < n_val; ++r) pred.push_back(model.predict(val.row(r)));
      record("linear", pred);
    });
  }

  Forest forest;
  stage("train", [&] {
    forest = train_stage(config, data.train);
    save("forest", "forest.json", to_json(forest));
  });
  NRFModel converted, tuned;
  stage("convert", [&] {
    converted = convert_stage(config, forest);
    save("nrf_converted", "nrf_converted.json", to_json(converted));
  });
  stage("finetune", [&] {
    tuned = finetune_stage(config, converted, data.train);
    save("nrf_finetuned", "nrf_finetuned.json", to_json(tuned));
  });
  HRFModel hrf;
  stage("compile", [&] {
    hrf = compile_stage(config, tuned);
    save("hrf_compiled", "hrf_compiled.json", to_json(hrf));
    save("layout", "layout.json", hrf.layout.to_json().dump(2));
  });
  report.predicted_counts = complexity_report(hrf);

  std::vector<int> rf_pred, hard_pred, conv_pred, soft_pred;
  stage("evaluate_clear", [&] {
    for (std::size_t r = 0; r < n_val; ++r) {
      const auto x = val.row(r);
      rf_pred.push_back(forest.predict_class(x));
      hard_pred.push_back(argmax(forward_hard(converted, x)));
      if (config.wants("nrf_converted")) conv_pred.push_back(argmax(forward_soft(converted, x)));
      soft_pred.push_back(argmax(forward_soft(tuned, x)));
    }
    record("rf", rf_pred);
    record("nrf_hard", hard_pred);
    record("nrf_converted", conv_pred);
    record("nrf_soft", soft_pred);
    report.agreement["rf_vs_nrf_hard"] = agreement(rf_pred, hard_pred);
  });

  const std::size_t ref_rows = config.reference_rows == 0 ? n_val : std::min(n_val, config.reference_rows);
  std::vector<std::vector<double>> ref_scores;
  const auto poly_activation = Activation::polynomial(hrf.activation);
  if (config.wants("hrf_reference")) {
    stage("evaluate_reference", [&] {
      ReferenceEngine engine(config.engine, rotation_steps(hrf));
      std::vector<int> pred, poly_pred;
      for (std::size_t r = 0; r < ref_rows; ++r) {
        StageCounts counts;
        ref_scores.push_back(infer(engine, hrf, val.row(r), &counts));
        pred.push_back(argmax(ref_scores.back()));
        poly_pred.push_back(argmax(forward(tuned, val.row(r), poly_activation)));
        if (!report.measured_counts) report.measured_counts = counts;
      }
      record("hrf_reference", pred);
      report.agreement["nrf_poly_vs_hrf_reference"] = agreement(poly_pred, pred);
      const std::vector<int> soft(soft_pred.begin(), soft_pred.begin() + static_cast<std::ptrdiff_t>(ref_rows));
      report.agreement["nrf_soft_vs_hrf_reference"] = agreement(soft, pred);
    });
  }

  if (config.wants("hrf_ckks") && config.ckks_rows > 0) {
    const EngineParams params = ckks_params(config);
    std::shared_ptr<const CkksKeyMaterial> keys;
    stage("keygen", [&] { keys = CkksKeyMaterial::generate(params, config.key_seed, rotation_steps(hrf)); });
    stage("evaluate_ckks", [&] {
      CkksEngine engine(params, keys);
      ReferenceEngine reference(config.engine);
      const std::size_t rows = std::min(n_val, config.ckks_rows);
      std::vector<int> pred;
      double worst = 0.0;
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t r = 0; r < rows; ++r) {
        StageCounts counts;
        const auto y = infer(engine, hrf, val.row(r), &counts);
        const auto ref = r < ref_scores.size() ? ref_scores[r] : infer(reference, hrf, val.row(r));
        for (std::size_t c = 0; c < y.size(); ++c) worst = std::max(worst, std::abs(y[c] - ref[c]));
        pred.push_back(argmax(y));
        report.measured_counts = counts;
        if ((r + 1) % 25 == 0) say("ckks " + std::to_string(r + 1) + "/" + std::to_string(rows));
      }
      report.ckks_seconds_per_inference = seconds_since(t0) / static_cast<double>(rows);
      report.ckks_max_abs_error = worst;
      record("hrf_ckks", pred);
      const std::vector<int> soft(soft_pred.begin(), soft_pred.begin() + static_cast<std::ptrdiff_t>(rows));
      report.agreement["nrf_soft_vs_hrf_ckks"] = agreement(soft, pred);
      if (!ref_scores.empty()) {
        std::vector<int> ref_pred;
        for (std::size_t r = 0; r < std::min(rows, ref_scores.size()); ++r) ref_pred.push_back(argmax(ref_scores[r]));
        const std::vector<int> head(pred.begin(), pred.begin() + static_cast<std::ptrdiff_t>(ref_pred.size()));
        report.agreement["hrf_reference_vs_hrf_ckks"] = agreement(ref_pred, head);
      }
    });
  }

  if (persist) {
    report.artifacts["report"] = out_path("report.json");
    report.artifacts["report_table"] = out_path("report.txt");
    write_text(out_path("report.json"), report.to_json().dump(2));
    write_text(out_path("report.txt"), report.to_table());
  }
  return report;
}

}  // namespace hrf::bench
