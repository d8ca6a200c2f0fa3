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

#include <filesystem>
#include <random>

#include "doctest.h"
#include "hrf/bench/pipeline.hpp"
#include "hrf/engine/key_store.hpp"
#include "hrf/engine/reference_engine.hpp"

using namespace hrf;
using namespace hrf::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hrf_test_bench_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small synthetic run on the reference backend plus a few CKKS rows at n = 1024.
ExperimentConfig small_config(const std::string& out) {
  ExperimentConfig c;
  c.dataset.synthetic.rows = 1200;
  c.forest.num_trees = 6;
  c.forest.tree.max_depth = 4;
  c.finetune.epochs = 10;
  c.logistic.epochs = 100;
  c.engine.slot_count = 512;
  c.ckks_rows = 3;
  c.output_dir = out;
  return c;
}

Dataset blobs(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d;
  d.num_features = 3;
  d.num_classes = 2;
  while (d.rows() < rows) {
    const double x[3] = {u(rng), u(rng), u(rng)};
    const double margin = x[0] + 0.5 * x[1] - 0.75;
    if (std::abs(margin) < 0.05) continue;
    d.add_row(x, margin > 0 ? 1.0 : 0.0);
  }
  return d;
}

}  // namespace

TEST_CASE("agreement and metrics") {
  const std::vector<int> a{0, 1, 1, 0, 1}, b{1, 0, 0, 1, 0};
  CHECK(agreement(a, a) == 1.0);
  CHECK(agreement(a, b) == 0.0);
  CHECK(agreement(std::vector<int>{}, std::vector<int>{}) == 1.0);
  CHECK_THROWS_AS(agreement(a, std::vector<int>{1}), DimensionError);

  // tp = 2, fp = 1, fn = 1, tn = 1
  const std::vector<int> pred{1, 1, 1, 0, 0}, truth{1, 1, 0, 1, 0};
  const auto m = classification_metrics(pred, truth);
  CHECK(m.accuracy == doctest::Approx(0.6));
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(m.rows == 5);
  const auto none = classification_metrics(std::vector<int>{0, 0}, std::vector<int>{0, 0});
  CHECK(none.precision == 0.0);
  CHECK(none.accuracy == 1.0);
  const auto back = Metrics::from_json(m.to_json());
  CHECK(back.f1 == m.f1);
}

TEST_CASE("logistic baseline") {
  const auto train = blobs(600, 1), val = blobs(400, 2);
  const auto model = train_logistic(train, LogisticParams{});
  std::size_t hit = 0;
  for (std::size_t r = 0; r < val.rows(); ++r) hit += model.predict(val.row(r)) == val.label(r);
  CHECK(static_cast<double>(hit) / static_cast<double>(val.rows()) >= 0.99);

  // Gradient against central differences.
  LogisticModel probe = model;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.5);
  for (auto& w : probe.weights) w += n(rng);
  for (auto& b : probe.bias) b += n(rng);
  const double l2 = 0.01;
  LogisticModel grad;
  logistic_loss(probe, train, l2, &grad);
  const double h = 1e-6;
  auto numeric = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = logistic_loss(probe, train, l2, nullptr);
    param = saved - h;
    const double down = logistic_loss(probe, train, l2, nullptr);
    param = saved;
    return (up - down) / (2 * h);
  };
  for (std::size_t i = 0; i < probe.weights.size(); ++i) {
    const double fd = numeric(probe.weights[i]);
    CHECK(std::abs(fd - grad.weights[i]) <= 1e-4 * std::max(1.0, std::abs(fd)));
  }
  for (std::size_t c = 0; c < probe.bias.size(); ++c) {
    const double fd = numeric(probe.bias[c]);
    CHECK(std::abs(fd - grad.bias[c]) <= 1e-4 * std::max(1.0, std::abs(fd)));
  }

  // Deterministic given the seed.
  CHECK(train_logistic(train, LogisticParams{}).weights == model.weights);
}

TEST_CASE("experiment config parsing") {
  ExperimentConfig c;
  c.forest.num_trees = 7;
  c.dilatation = 3.0;
  c.variants = {"rf", "nrf_hard"};
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.wants("rf"));
  CHECK_FALSE(back.wants("hrf_ckks"));

  auto j = c.to_json();
  j["forest"]["depth"] = 3;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = c.to_json();
  j["colour"] = "blue";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = c.to_json();
  j["forest"]["num_trees"] = "many";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);

  c = ExperimentConfig{};
  c.degree = 4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.variants = {"forest"};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.dataset.path = "table.csv";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("pipeline end to end on synthetic data") {
  const auto dir = scratch_dir("run");
  const auto config = small_config((dir / "a").string());
  const auto report = run_pipeline(config);

  // Every configured variant reports a row with metrics in [0, 1].
  for (const auto& v : config.variants) {
    const Metrics* m = report.find(v);
    REQUIRE_MESSAGE(m != nullptr, v);
    for (double x : {m->accuracy, m->precision, m->recall, m->f1}) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
  CHECK(report.find("hrf_ckks")->rows == config.ckks_rows);
  CHECK(report.find("rf")->rows == report.validation_rows);

  // Exact representations.
  const auto* rf = report.find("rf");
  const auto* hard = report.find("nrf_hard");
  CHECK(hard->accuracy == rf->accuracy);
  CHECK(hard->precision == rf->precision);
  CHECK(hard->f1 == rf->f1);
  CHECK(report.agreement.at("rf_vs_nrf_hard") == 1.0);
  CHECK(report.agreement.at("nrf_poly_vs_hrf_reference") == 1.0);
  CHECK(report.agreement.at("hrf_reference_vs_hrf_ckks") == 1.0);
  REQUIRE(report.ckks_max_abs_error);
  CHECK(*report.ckks_max_abs_error < 1e-2);

  REQUIRE(report.measured_counts);
  REQUIRE(report.predicted_counts);
  CHECK(*report.measured_counts == *report.predicted_counts);
  CHECK(report.measured_counts->total().depth_consumed == static_cast<std::uint64_t>(depth_requirement(7)));

  for (const auto& c : threshold_checks(report, true)) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);

  for (const char* file : {"config.json", "preprocessor.json", "forest.json", "nrf_converted.json",
                           "nrf_finetuned.json", "hrf_compiled.json", "layout.json", "report.json", "report.txt"}) {
    CHECK_MESSAGE(fs::exists(dir / "a" / file), file);
  }

  // The saved report reads back.
  const auto saved = MetricsReport::from_json(nlohmann::json::parse(read_text((dir / "a" / "report.json").string())));
  CHECK(saved.to_json() == report.to_json());

  // Identical configuration, identical results and model files.
  auto again = config;
  again.output_dir = (dir / "b").string();
  const auto second = run_pipeline(again);
  auto strip = [](nlohmann::json j) {
    j.erase("artifacts");
    return j;
  };
  CHECK(strip(second.to_json(false)) == strip(report.to_json(false)));
  for (const char* file : {"forest.json", "nrf_finetuned.json", "hrf_compiled.json"}) {
    CHECK_MESSAGE(read_text((dir / "a" / file).string()) == read_text((dir / "b" / file).string()), file);
  }
}

TEST_CASE("pipeline stage failures name the stage") {
  const auto dir = scratch_dir("fail");
  auto config = small_config((dir / "out").string());
  config.engine.depth_budget = 6;
  try {
    run_pipeline(config);
    FAIL("expected a compile failure");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "compile");
    CHECK(e.artifacts().count("forest") == 1);
    CHECK(e.artifacts().count("nrf_finetuned") == 1);
  }

  config = small_config("");
  config.dataset.path = (dir / "missing.csv").string();
  config.dataset.schema = synthetic_schema(config.dataset.synthetic);
  try {
    run_pipeline(config);
    FAIL("expected a load failure");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "load");
    CHECK(e.artifacts().empty());
  }
}

TEST_CASE("threshold checks") {
  MetricsReport r;
  auto put = [&](const std::string& name, double acc) {
    Metrics m;
    m.accuracy = acc;
    r.variants.emplace_back(name, m);
  };
  put("rf", 0.85);
  put("nrf_soft", 0.848);
  r.agreement["nrf_soft_vs_hrf_ckks"] = 0.97;
  for (const auto& c : threshold_checks(r, false)) CHECK_MESSAGE(c.passed, c.name);
  r.variants[1].second.accuracy = 0.844;
  const auto checks = threshold_checks(r, false);
  CHECK(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }) == 1);
  r.agreement.clear();
  r.variants[1].second.accuracy = 0.85;
  const auto missing = threshold_checks(r, false);
  CHECK_FALSE(missing.back().passed);
  CHECK(missing.back().detail.find("missing") != std::string::npos);
}

TEST_CASE("client and server share only what they need") {
  const auto dir = scratch_dir("keys");
  EngineParams params;
  params.slot_count = 512;
  params.backend = Backend::kCkks;
  const auto keys = CkksKeyMaterial::generate(params, 9, {1, 2, 4});
  save_key_material(*keys, (dir / "k").string());
  for (const char* f : {"public.key", "secret.key", "relin.key", "galois.key"}) CHECK(fs::exists(dir / "k" / f));

  std::vector<double> x(params.slot_count);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.001 * static_cast<double>(i % 97);

  // Client encrypts with the public key only.
  const auto pub = load_key_material((dir / "k").string(), kPublicKeyPart);
  CHECK_FALSE(pub->secret);
  CkksEngine client(engine_params_for(*pub->context), pub);
  CHECK_THROWS(client.decrypt_decode(client.encode_encrypt(x)));
  save_ciphertexts((dir / "in.ct").string(), client, {client.encode_encrypt(x)});

  // Server rotates and squares with evaluation keys only.
  const auto eval_keys = load_key_material((dir / "k").string(), kEvaluationKeyParts);
  CHECK_FALSE(eval_keys->secret);
  CkksEngine server(engine_params_for(*eval_keys->context), eval_keys);
  const auto in = load_ciphertexts((dir / "in.ct").string(), server);
  REQUIRE(in.size() == 1);
  CHECK_THROWS_AS(server.encode_encrypt(x), KeyError);
  const auto rotated = server.rotate(in[0], 2);
  const auto squared = server.mul_cipher(in[0], in[0]);
  save_ciphertexts((dir / "out.ct").string(), server, {rotated, squared});

  // Client decrypts with the secret key.
  const auto sec = load_key_material((dir / "k").string(), kSecretKeyPart);
  CkksEngine owner(engine_params_for(*sec->context), sec);
  const auto out = load_ciphertexts((dir / "out.ct").string(), owner);
  REQUIRE(out.size() == 2);
  const auto r = owner.decrypt_decode(out[0]);
  const auto s = owner.decrypt_decode(out[1]);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(r[i] - x[(i + 2) % x.size()]) < 1e-6);
    CHECK(std::abs(s[i] - x[i] * x[i]) < 1e-6);
  }

  // Keys from another key set are rejected.
  const auto other = CkksKeyMaterial::generate(params, 10, {1});
  save_key_material(*other, (dir / "other").string());
  fs::copy_file(dir / "other" / "galois.key", dir / "k" / "galois.key", fs::copy_options::overwrite_existing);
  CHECK_THROWS_AS(load_key_material((dir / "k").string(), kEvaluationKeyParts), KeyMismatchError);
  CHECK_THROWS_AS(load_ciphertexts((dir / "in.ct").string(),
                                   CkksEngine(engine_params_for(*other->context), other)),
                  KeyMismatchError);
}
