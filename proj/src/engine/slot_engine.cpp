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

#include "hrf/engine/slot_engine.hpp"

#include <algorithm>
#include <bit>

#include "hrf/error.hpp"

namespace hrf {

std::string to_string(Backend backend) {
  return backend == Backend::kCkks ? "ckks" : "reference";
}

Backend backend_from_string(const std::string& name) {
  if (name == "reference") return Backend::kReference;
  if (name == "ckks") return Backend::kCkks;
  throw ConfigError("unknown backend '" + name + "' (expected reference or ckks)");
}

void EngineParams::validate() const {
  if (slot_count == 0 || !std::has_single_bit(slot_count)) {
    throw ConfigError("slot_count must be a power of two, got " + std::to_string(slot_count));
  }
  if (depth_budget < 0) throw ConfigError("depth_budget must be non-negative");
  if (scale_bits <= 0 || scale_bits > 58) throw ConfigError("scale_bits must be in [1, 58]");
}

OpCounter OpCounter::operator-(const OpCounter& rhs) const {
  return {additions - rhs.additions, plain_multiplications - rhs.plain_multiplications,
          cipher_multiplications - rhs.cipher_multiplications, rotations - rhs.rotations, depth_consumed};
}

SlotEngine::SlotEngine(EngineParams params) : params_(params) { params_.validate(); }

void SlotEngine::check_owned(const CipherHandle& c, const char* op) const {
  if (c.engine_id() != id()) {
    throw KeyMismatchError(std::string(op) + ": handle was produced under different keys");
  }
}

void SlotEngine::check_length(std::size_t length, const char* op) const {
  if (length != slot_count()) {
    throw DimensionError(std::string(op) + ": expected " + std::to_string(slot_count()) +
                         " slots, got " + std::to_string(length));
  }
}

void SlotEngine::check_multiplicable(const CipherHandle& c, const char* op) const {
  if (c.level() < 1) {
    throw DepthBudgetError(std::string(op) + ": depth budget of " + std::to_string(depth_budget()) +
                           " levels exhausted");
  }
}

void SlotEngine::note_level(int level) {
  const auto used = static_cast<std::uint64_t>(depth_budget() - level);
  counters_.depth_consumed = std::max(counters_.depth_consumed, used);
}

CipherHandle SlotEngine::encode_encrypt(std::span<const double> values) {
  check_length(values.size(), "encode_encrypt");
  return do_encode_encrypt(values);
}

SlotVector SlotEngine::decrypt_decode(const CipherHandle& c) const {
  check_owned(c, "decrypt_decode");
  return do_decrypt_decode(c);
}

CipherHandle SlotEngine::add(const CipherHandle& a, const CipherHandle& b) {
  check_owned(a, "add");
  check_owned(b, "add");
  if (a.level() != b.level()) {
    throw AlignmentError("add: level mismatch (" + std::to_string(a.level()) + " vs " +
                         std::to_string(b.level()) + ")");
  }
  auto out = do_add(a, b, false);
  ++counters_.additions;
  return out;
}

CipherHandle SlotEngine::add(const CipherHandle& a, std::span<const double> p) {
  check_owned(a, "add");
  check_length(p.size(), "add");
  auto out = do_add_plain(a, p, false);
  ++counters_.additions;
  return out;
}

CipherHandle SlotEngine::sub(const CipherHandle& a, const CipherHandle& b) {
  check_owned(a, "sub");
  check_owned(b, "sub");
  if (a.level() != b.level()) {
    throw AlignmentError("sub: level mismatch (" + std::to_string(a.level()) + " vs " +
                         std::to_string(b.level()) + ")");
  }
  auto out = do_add(a, b, true);
  ++counters_.additions;
  return out;
}

CipherHandle SlotEngine::sub(const CipherHandle& a, std::span<const double> p) {
  check_owned(a, "sub");
  check_length(p.size(), "sub");
  auto out = do_add_plain(a, p, true);
  ++counters_.additions;
  return out;
}

CipherHandle SlotEngine::mul_plain(const CipherHandle& c, std::span<const double> p) {
  check_owned(c, "mul_plain");
  check_length(p.size(), "mul_plain");
  check_multiplicable(c, "mul_plain");
  auto out = do_mul_plain(c, p);
  ++counters_.plain_multiplications;
  note_level(out.level());
  return out;
}

CipherHandle SlotEngine::mul_cipher(const CipherHandle& a, const CipherHandle& b) {
  check_owned(a, "mul_cipher");
  check_owned(b, "mul_cipher");
  if (a.level() != b.level()) {
    throw AlignmentError("mul_cipher: level mismatch (" + std::to_string(a.level()) + " vs " +
                         std::to_string(b.level()) + ")");
  }
  check_multiplicable(a, "mul_cipher");
  auto out = do_mul_cipher(a, b);
  ++counters_.cipher_multiplications;
  note_level(out.level());
  return out;
}

CipherHandle SlotEngine::rotate(const CipherHandle& c, std::size_t steps) {
  check_owned(c, "rotate");
  if (steps >= slot_count()) {
    throw DimensionError("rotate: step " + std::to_string(steps) + " outside [0, " +
                         std::to_string(slot_count()) + ")");
  }
  auto out = do_rotate(c, steps);
  ++counters_.rotations;
  return out;
}

CipherHandle SlotEngine::drop_level(const CipherHandle& c, int level) {
  check_owned(c, "drop_level");
  if (level > c.level() || level < 0) {
    throw AlignmentError("drop_level: cannot move from level " + std::to_string(c.level()) + " to " +
                         std::to_string(level));
  }
  if (level == c.level()) return c;
  auto out = do_drop_level(c, level);
  note_level(out.level());
  return out;
}

}  // namespace hrf
