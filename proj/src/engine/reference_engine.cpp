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

#include "hrf/engine/reference_engine.hpp"

#include <atomic>
#include <cmath>

#include "hrf/error.hpp"

namespace hrf {

namespace {

std::uint64_t next_engine_id() {
  static std::atomic<std::uint64_t> counter{1};
  // High bit distinguishes simulator ids from CKKS key ids in diagnostics.
  return (std::uint64_t{1} << 63) | counter.fetch_add(1);
}

const SlotVector& slots_of(const CipherHandle& c) { return std::get<SlotVector>(c.payload()); }

}  // namespace

ReferenceEngine::ReferenceEngine(EngineParams params, std::optional<std::set<std::size_t>> rotation_steps)
    : ReferenceEngine(params, std::move(rotation_steps), next_engine_id()) {}

ReferenceEngine::ReferenceEngine(EngineParams params, std::optional<std::set<std::size_t>> steps,
                                 std::uint64_t id)
    : SlotEngine(params), rotation_steps_(std::move(steps)), id_(id) {}

std::unique_ptr<SlotEngine> ReferenceEngine::fork() const {
  return std::unique_ptr<SlotEngine>(new ReferenceEngine(params(), rotation_steps_, id_));
}

CipherHandle ReferenceEngine::make(SlotVector slots, int level) const {
  return CipherHandle(std::move(slots), id_, level, std::ldexp(1.0, params().scale_bits));
}

CipherHandle ReferenceEngine::do_encode_encrypt(std::span<const double> values) {
  return make(SlotVector(values.begin(), values.end()), depth_budget());
}

SlotVector ReferenceEngine::do_decrypt_decode(const CipherHandle& c) const { return slots_of(c); }

CipherHandle ReferenceEngine::do_add(const CipherHandle& a, const CipherHandle& b, bool subtract) {
  SlotVector out = slots_of(a);
  const auto& y = slots_of(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = subtract ? out[i] - y[i] : out[i] + y[i];
  return make(std::move(out), a.level());
}

CipherHandle ReferenceEngine::do_add_plain(const CipherHandle& a, std::span<const double> p, bool subtract) {
  SlotVector out = slots_of(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = subtract ? out[i] - p[i] : out[i] + p[i];
  return make(std::move(out), a.level());
}

CipherHandle ReferenceEngine::do_mul_plain(const CipherHandle& c, std::span<const double> p) {
  SlotVector out = slots_of(c);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= p[i];
  return make(std::move(out), c.level() - 1);
}

CipherHandle ReferenceEngine::do_mul_cipher(const CipherHandle& a, const CipherHandle& b) {
  SlotVector out = slots_of(a);
  const auto& y = slots_of(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return make(std::move(out), a.level() - 1);
}

CipherHandle ReferenceEngine::do_rotate(const CipherHandle& c, std::size_t steps) {
  if (steps != 0 && rotation_steps_ && !rotation_steps_->contains(steps)) {
    throw KeyError("rotate: no rotation key for step " + std::to_string(steps));
  }
  const auto& x = slots_of(c);
  const std::size_t n = x.size();
  SlotVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[(i + steps) % n];
  return make(std::move(out), c.level());
}

CipherHandle ReferenceEngine::do_drop_level(const CipherHandle& c, int level) {
  return make(slots_of(c), level);
}

}  // namespace hrf
