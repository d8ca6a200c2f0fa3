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

#include "hrf/compiler/hrf.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hrf/error.hpp"
#include "hrf/util/json_fields.hpp"

namespace hrf {

namespace {

constexpr int kCompiledFormatVersion = 1;

std::size_t ceil_log2(std::size_t x) { return x <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(x - 1)); }

// Re-raises engine errors with the stage name prepended, keeping the type.
template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  const auto prefix = [&](const std::exception& e) { return std::string(stage) + ": " + e.what(); };
  try {
    return f();
  } catch (const DimensionError& e) {
    throw DimensionError(prefix(e));
  } catch (const KeyMismatchError& e) {
    throw KeyMismatchError(prefix(e));
  } catch (const AlignmentError& e) {
    throw AlignmentError(prefix(e));
  } catch (const DepthBudgetError& e) {
    throw DepthBudgetError(prefix(e));
  } catch (const KeyError& e) {
    throw KeyError(prefix(e));
  } catch (const EncodingRangeError& e) {
    throw EncodingRangeError(prefix(e));
  }
}

OpCounter counts(std::uint64_t add, std::uint64_t mul, std::uint64_t rot, std::uint64_t depth) {
  OpCounter c;
  c.additions = add;
  c.plain_multiplications = mul;
  c.rotations = rot;
  c.depth_consumed = depth;
  return c;
}

nlohmann::json active_prefix(const SlotVector& v, std::size_t width) {
  return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(width));
}

SlotVector expand(const nlohmann::json& j, const std::string& path, std::size_t width, std::size_t n) {
  auto v = j.get<std::vector<double>>();
  if (v.size() != width) throw ValidationError(path + ": expected " + std::to_string(width) + " entries");
  v.resize(n, 0.0);
  return v;
}

}  // namespace

void PackingLayout::validate() const {
  if (trees == 0 || leaves == 0) throw LayoutError("layout: need at least one tree and one leaf");
  if (slot_count == 0 || !std::has_single_bit(slot_count)) throw LayoutError("layout: slot count must be a power of two");
  if (tau.size() != trees) throw LayoutError("layout: expected one tau array per tree");
  for (const auto& t : tau) {
    if (t.size() + 1 != leaves) throw LayoutError("layout: tau arrays need K - 1 entries");
    for (int f : t) {
      if (f < 0 || static_cast<std::size_t>(f) >= std::max<std::size_t>(1, num_features)) {
        throw LayoutError("layout: feature index out of range");
      }
    }
  }
  if (active_width() > slot_count) {
    std::ostringstream msg;
    msg << "layout: L(2K-1) = " << trees << "*" << block_width() << " = " << active_width() << " > n = " << slot_count
        << "; use at most " << slot_count / block_width() << " trees at K = " << leaves
        << ", shallower trees, or a larger ring";
    throw LayoutError(msg.str());
  }
}

nlohmann::json PackingLayout::to_json() const {
  return {{"format", "hrf-layout"}, {"version", 1},         {"L", trees},  {"K", leaves},
          {"d", num_features},      {"block_width", block_width()}, {"n", slot_count}, {"tau", tau}};
}

PackingLayout PackingLayout::from_json(const nlohmann::json& j) {
  using namespace json_fields;
  PackingLayout layout;
  layout.trees = get<std::size_t>(j, "L", "layout");
  layout.leaves = get<std::size_t>(j, "K", "layout");
  layout.num_features = get<std::size_t>(j, "d", "layout");
  layout.slot_count = get<std::size_t>(j, "n", "layout");
  layout.tau = get<std::vector<std::vector<int>>>(j, "tau", "layout");
  if (get<std::size_t>(j, "block_width", "layout") != layout.block_width()) {
    throw ValidationError("layout.block_width: must equal 2K - 1");
  }
  layout.validate();
  return layout;
}

int depth_requirement(int degree) { return 2 * poly_depth(degree) + 2; }

SlotVector pack_input(const PackingLayout& layout, std::span<const double> x) {
  layout.validate();
  if (x.size() != layout.num_features) {
    throw DimensionError("pack_input: got " + std::to_string(x.size()) + " features, layout expects " +
                         std::to_string(layout.num_features));
  }
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) throw RangeError("pack_input: features must lie in [0,1]");
  }
  SlotVector out(layout.slot_count, 0.0);
  const std::size_t k = layout.leaves;
  for (std::size_t l = 0; l < layout.trees; ++l) {
    const std::size_t base = layout.offset(l);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const double v = x[static_cast<std::size_t>(layout.tau[l][i])];
      out[base + i] = v;
      out[base + k + i] = v;
    }
  }
  return out;
}

HRFModel compile(const NRFModel& model, const EngineParams& params) {
  params.validate();
  model.validate();
  if (!model.normalized()) throw StateError("compile: model must be normalized");
  if (model.activation.kind != ActivationKind::kPolynomial) {
    throw ValidationError("compile: model activation must be polynomial");
  }
  HRFModel hrf;
  hrf.activation = model.activation.poly;
  hrf.depth_requirement = depth_requirement(hrf.activation.degree);
  if (hrf.depth_requirement > params.depth_budget) {
    std::ostringstream msg;
    msg << "compile: depth requirement 2(ceil(log2 m)+1)+2 = " << hrf.depth_requirement << " at m = "
        << hrf.activation.degree << " exceeds the budget " << params.depth_budget << "; raise depth_budget to "
        << hrf.depth_requirement << " or lower the degree";
    throw DepthBudgetError(msg.str());
  }
  auto& layout = hrf.layout;
  layout.trees = model.networks.size();
  layout.leaves = model.leaves();
  layout.num_features = model.num_features;
  layout.slot_count = params.slot_count;
  for (const auto& net : model.networks) layout.tau.push_back(net.tau);
  layout.validate();

  const std::size_t n = params.slot_count, k = layout.leaves, m = k - 1, c_dim = model.output_dim();
  hrf.task = model.task;
  hrf.num_classes = model.num_classes;
  hrf.class_names = model.class_names;
  hrf.t_packed.assign(n, 0.0);
  hrf.b_packed.assign(n, 0.0);
  hrf.diagonals.assign(k, SlotVector(n, 0.0));
  hrf.w_packed.assign(c_dim, SlotVector(n, 0.0));
  hrf.beta.assign(c_dim, 0.0);
  for (std::size_t l = 0; l < layout.trees; ++l) {
    const auto& net = model.networks[l];
    const std::size_t base = layout.offset(l);
    for (std::size_t i = 0; i < m; ++i) {
      hrf.t_packed[base + i] = net.t[i];
      hrf.t_packed[base + k + i] = net.t[i];
    }
    for (std::size_t r = 0; r < k; ++r) {
      hrf.b_packed[base + r] = net.b[r];
      // Square padding: column K-1 of the K x K matrix is zero.
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t col = (r + i) % k;
        hrf.diagonals[i][base + r] = col < m ? net.v_at(r, col) : 0.0;
      }
    }
    for (std::size_t c = 0; c < c_dim; ++c) {
      for (std::size_t r = 0; r < k; ++r) hrf.w_packed[c][base + r] = model.alpha[l] * net.w_at(c, r);
      hrf.beta[c] += model.alpha[l] * net.beta[c];
    }
  }
  return hrf;
}

std::set<std::size_t> rotation_steps(std::size_t trees, std::size_t leaves) {
  std::set<std::size_t> steps;
  for (std::size_t i = 1; i < leaves; ++i) steps.insert(i);
  const std::size_t rounds = ceil_log2(trees * (2 * leaves - 1));
  for (std::size_t j = 0; j < rounds; ++j) steps.insert(std::size_t{1} << j);
  return steps;
}

std::set<std::size_t> rotation_steps(const HRFModel& hrf) {
  return rotation_steps(hrf.layout.trees, hrf.layout.leaves);
}

CipherHandle packed_matmul(SlotEngine& engine, std::span<const SlotVector> diagonals, const CipherHandle& c,
                           std::span<const double> seed) {
  if (diagonals.empty()) throw DimensionError("packed_matmul: no diagonals");
  CipherHandle acc = engine.mul_plain(engine.rotate(c, 0), diagonals[0]);
  if (!seed.empty()) {
    acc = engine.add(acc, seed);
  } else {
    acc = engine.add(acc, SlotVector(engine.slot_count(), 0.0));
  }
  for (std::size_t i = 1; i < diagonals.size(); ++i) {
    acc = engine.add(acc, engine.mul_plain(engine.rotate(c, i), diagonals[i]));
  }
  return acc;
}

CipherHandle dot_product(SlotEngine& engine, std::span<const double> w, const CipherHandle& c,
                         std::size_t active_width) {
  if (active_width == 0 || active_width > engine.slot_count()) {
    throw LayoutError("dot_product: active width must lie in [1, n]");
  }
  for (std::size_t i = active_width; i < w.size(); ++i) {
    if (w[i] != 0.0) throw LayoutError("dot_product: weights must be zero beyond the active width");
  }
  CipherHandle acc = engine.mul_plain(c, w);
  const std::size_t rounds = ceil_log2(active_width);
  for (std::size_t j = 0; j < rounds; ++j) acc = engine.add(acc, engine.rotate(acc, std::size_t{1} << j));
  return acc;
}

OpCounter StageCounts::total() const {
  OpCounter t;
  for (const OpCounter* s : {&layer1, &activation1, &layer2, &activation2, &layer3, &output_bias}) {
    t.additions += s->additions;
    t.plain_multiplications += s->plain_multiplications;
    t.cipher_multiplications += s->cipher_multiplications;
    t.rotations += s->rotations;
    t.depth_consumed += s->depth_consumed;
  }
  return t;
}

nlohmann::json StageCounts::to_json() const {
  auto one = [](const OpCounter& c) {
    return nlohmann::json{{"additions", c.additions},
                          {"plain_multiplications", c.plain_multiplications},
                          {"cipher_multiplications", c.cipher_multiplications},
                          {"rotations", c.rotations},
                          {"levels", c.depth_consumed}};
  };
  return {{"layer1", one(layer1)},         {"activation1", one(activation1)}, {"layer2", one(layer2)},
          {"activation2", one(activation2)}, {"layer3", one(layer3)},     {"output_bias", one(output_bias)},
          {"total", one(total())}};
}

StageCounts StageCounts::from_json(const nlohmann::json& j) {
  using json_fields::get;
  auto one = [&](const char* stage) {
    const auto& s = json_fields::member(j, stage, "counts");
    const std::string path = std::string("counts.") + stage;
    OpCounter c;
    c.additions = get<std::uint64_t>(s, "additions", path);
    c.plain_multiplications = get<std::uint64_t>(s, "plain_multiplications", path);
    c.cipher_multiplications = get<std::uint64_t>(s, "cipher_multiplications", path);
    c.rotations = get<std::uint64_t>(s, "rotations", path);
    c.depth_consumed = get<std::uint64_t>(s, "levels", path);
    return c;
  };
  return {one("layer1"), one("activation1"), one("layer2"), one("activation2"), one("layer3"), one("output_bias")};
}

EvaluationResult evaluate(SlotEngine& engine, const HRFModel& hrf, const CipherHandle& input,
                          const StageObserver& observer) {
  if (engine.slot_count() != hrf.layout.slot_count) {
    throw LayoutError("evaluate: engine has " + std::to_string(engine.slot_count()) + " slots, model expects " +
                      std::to_string(hrf.layout.slot_count));
  }
  if (input.level() < hrf.depth_requirement) {
    throw DepthBudgetError("evaluate: input has " + std::to_string(input.level()) + " levels, model needs " +
                           std::to_string(hrf.depth_requirement));
  }
  EvaluationResult result;
  OpCounter mark = engine.counters();
  int level = input.level();
  auto close = [&](OpCounter& stage, const CipherHandle& out) {
    stage = engine.counters() - mark;
    stage.depth_consumed = static_cast<std::uint64_t>(level - out.level());
    mark = engine.counters();
    level = out.level();
  };

  const CipherHandle diff = in_stage("layer1", [&] { return engine.sub(input, hrf.t_packed); });
  close(result.counts.layer1, diff);
  if (observer) observer("activation1_input", diff);
  const CipherHandle u = in_stage("activation1", [&] { return eval_homomorphic(hrf.activation, engine, diff); });
  close(result.counts.activation1, u);

  const CipherHandle s = in_stage("layer2", [&] { return packed_matmul(engine, hrf.diagonals, u, hrf.b_packed); });
  close(result.counts.layer2, s);
  if (observer) observer("activation2_input", s);
  const CipherHandle v = in_stage("activation2", [&] { return eval_homomorphic(hrf.activation, engine, s); });
  close(result.counts.activation2, v);

  const std::size_t width = hrf.layout.active_width();
  std::vector<CipherHandle> raw;
  for (const auto& w : hrf.w_packed) raw.push_back(in_stage("layer3", [&] { return dot_product(engine, w, v, width); }));
  close(result.counts.layer3, raw.front());

  SlotVector bias(engine.slot_count(), 0.0);
  for (std::size_t c = 0; c < raw.size(); ++c) {
    bias[0] = hrf.beta[c];
    result.scores.push_back(in_stage("output_bias", [&] { return engine.add(raw[c], bias); }));
  }
  close(result.counts.output_bias, result.scores.front());
  return result;
}

std::vector<double> infer(SlotEngine& engine, const HRFModel& hrf, std::span<const double> x, StageCounts* counts) {
  const auto packed = pack_input(hrf.layout, x);
  const auto result = evaluate(engine, hrf, engine.encode_encrypt(packed));
  if (counts) *counts = result.counts;
  std::vector<double> y;
  for (const auto& c : result.scores) y.push_back(engine.decrypt_decode(c)[0]);
  return y;
}

StageCounts complexity_report(const HRFModel& hrf) {
  const auto poly = make_plan(hrf.activation).cost();
  const std::uint64_t k = hrf.layout.leaves, c = hrf.output_dim();
  const std::uint64_t rounds = ceil_log2(hrf.layout.active_width());
  const auto pd = static_cast<std::uint64_t>(poly_depth(hrf.activation.degree));
  StageCounts s;
  s.layer1 = counts(1, 0, 0, 0);
  s.activation1 = poly;
  s.activation1.depth_consumed = pd;
  s.layer2 = counts(k, k, k, 1);
  s.activation2 = s.activation1;
  s.layer3 = counts(c * rounds, c, c * rounds, 1);
  s.output_bias = counts(c, 0, 0, 0);
  return s;
}

std::string to_json(const HRFModel& hrf) {
  using nlohmann::json;
  const std::size_t width = hrf.layout.active_width();
  json diagonals = json::array(), weights = json::array();
  for (const auto& d : hrf.diagonals) diagonals.push_back(active_prefix(d, width));
  for (const auto& w : hrf.w_packed) weights.push_back(active_prefix(w, width));
  json j{{"format", "hrf-compiled"},
         {"version", kCompiledFormatVersion},
         {"layout", hrf.layout.to_json()},
         {"task", to_string(hrf.task)},
         {"num_classes", hrf.num_classes},
         {"class_names", hrf.class_names},
         {"activation", hrf.activation.to_json()},
         {"depth_requirement", hrf.depth_requirement},
         {"t_packed", active_prefix(hrf.t_packed, width)},
         {"b_packed", active_prefix(hrf.b_packed, width)},
         {"diagonals", diagonals},
         {"w_packed", weights},
         {"beta", hrf.beta}};
  return j.dump();
}

HRFModel hrf_from_json(const std::string& text) {
  using namespace json_fields;
  const json j = parse(text, "compiled model");
  if (get<std::string>(j, "format", "") != "hrf-compiled") throw ValidationError("format: expected 'hrf-compiled'");
  if (get<int>(j, "version", "") != kCompiledFormatVersion) throw ValidationError("version: unsupported");
  HRFModel hrf;
  hrf.layout = PackingLayout::from_json(member(j, "layout", ""));
  hrf.task = task_from_string(get<std::string>(j, "task", ""));
  hrf.num_classes = get<int>(j, "num_classes", "");
  hrf.class_names = get_or<std::vector<std::string>>(j, "class_names", "", {});
  hrf.activation = ChebyshevPoly::from_json(member(j, "activation", ""));
  hrf.depth_requirement = get<int>(j, "depth_requirement", "");
  if (hrf.depth_requirement != depth_requirement(hrf.activation.degree)) {
    throw ValidationError("depth_requirement: inconsistent with the activation degree");
  }
  const std::size_t width = hrf.layout.active_width(), n = hrf.layout.slot_count;
  hrf.t_packed = expand(member(j, "t_packed", ""), "t_packed", width, n);
  hrf.b_packed = expand(member(j, "b_packed", ""), "b_packed", width, n);
  const json& diagonals = member(j, "diagonals", "");
  if (!diagonals.is_array() || diagonals.size() != hrf.layout.leaves) {
    throw ValidationError("diagonals: expected K vectors");
  }
  for (std::size_t i = 0; i < diagonals.size(); ++i) {
    hrf.diagonals.push_back(expand(diagonals[i], "diagonals[" + std::to_string(i) + "]", width, n));
  }
  hrf.beta = get<std::vector<double>>(j, "beta", "");
  const json& weights = member(j, "w_packed", "");
  if (!weights.is_array() || weights.size() != hrf.beta.size() || weights.empty()) {
    throw ValidationError("w_packed: expected one vector per output");
  }
  for (std::size_t c = 0; c < weights.size(); ++c) {
    hrf.w_packed.push_back(expand(weights[c], "w_packed[" + std::to_string(c) + "]", width, n));
  }
  return hrf;
}

}  // namespace hrf
