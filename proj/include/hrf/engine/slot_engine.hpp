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
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hrf/ckks/cipher.hpp"

namespace hrf {

enum class Backend { kReference, kCkks };

std::string to_string(Backend backend);
Backend backend_from_string(const std::string& name);

struct EngineParams {
  std::size_t slot_count = 8192;  // n = N / 2, a power of two
  int depth_budget = 10;
  int scale_bits = 40;
  Backend backend = Backend::kReference;

  void validate() const;
};

using SlotVector = std::vector<double>;

struct OpCounter {
  std::uint64_t additions = 0;
  std::uint64_t plain_multiplications = 0;
  std::uint64_t cipher_multiplications = 0;
  std::uint64_t rotations = 0;
  std::uint64_t depth_consumed = 0;

  bool operator==(const OpCounter&) const = default;
  // Component-wise difference of the four operation counts; depth_consumed is
  // taken from the left operand.
  OpCounter operator-(const OpCounter& rhs) const;
};

// Encrypted (or simulated) vector of n real slots. `level` counts remaining
// multiplications. Handles carry the id of the engine keys that produced them.
class CipherHandle {
 public:
  using Payload = std::variant<SlotVector, ckks::Ciphertext>;

  CipherHandle(Payload payload, std::uint64_t engine_id, int level, double scale)
      : payload_(std::move(payload)), engine_id_(engine_id), level_(level), scale_(scale) {}

  int level() const { return level_; }
  double scale() const { return scale_; }
  std::uint64_t engine_id() const { return engine_id_; }
  const Payload& payload() const { return payload_; }

 private:
  Payload payload_;
  std::uint64_t engine_id_;
  int level_;
  double scale_;
};

// Leveled SIMD evaluation contract. Public operations validate operands and
// maintain the counters; backends implement the do_* hooks.
class SlotEngine {
 public:
  explicit SlotEngine(EngineParams params);
  virtual ~SlotEngine() = default;
  SlotEngine(const SlotEngine&) = delete;
  SlotEngine& operator=(const SlotEngine&) = delete;

  const EngineParams& params() const { return params_; }
  std::size_t slot_count() const { return params_.slot_count; }
  int depth_budget() const { return params_.depth_budget; }
  virtual std::uint64_t id() const = 0;

  CipherHandle encode_encrypt(std::span<const double> values);
  SlotVector decrypt_decode(const CipherHandle& c) const;

  CipherHandle add(const CipherHandle& a, const CipherHandle& b);
  CipherHandle add(const CipherHandle& a, std::span<const double> p);
  // a - b, counted as one addition.
  CipherHandle sub(const CipherHandle& a, const CipherHandle& b);
  CipherHandle sub(const CipherHandle& a, std::span<const double> p);
  CipherHandle mul_plain(const CipherHandle& c, std::span<const double> p);
  CipherHandle mul_cipher(const CipherHandle& a, const CipherHandle& b);
  CipherHandle rotate(const CipherHandle& c, std::size_t steps);
  // Lowers the level without a multiplication; not counted.
  CipherHandle drop_level(const CipherHandle& c, int level);

  const OpCounter& counters() const { return counters_; }
  void reset_counters() { counters_ = OpCounter{}; }

  // A new evaluation context over the same keys with zeroed counters.
  virtual std::unique_ptr<SlotEngine> fork() const = 0;

 protected:
  virtual CipherHandle do_encode_encrypt(std::span<const double> values) = 0;
  virtual SlotVector do_decrypt_decode(const CipherHandle& c) const = 0;
  virtual CipherHandle do_add(const CipherHandle& a, const CipherHandle& b, bool subtract) = 0;
  virtual CipherHandle do_add_plain(const CipherHandle& a, std::span<const double> p, bool subtract) = 0;
  virtual CipherHandle do_mul_plain(const CipherHandle& c, std::span<const double> p) = 0;
  virtual CipherHandle do_mul_cipher(const CipherHandle& a, const CipherHandle& b) = 0;
  virtual CipherHandle do_rotate(const CipherHandle& c, std::size_t steps) = 0;
  virtual CipherHandle do_drop_level(const CipherHandle& c, int level) = 0;

 private:
  void check_owned(const CipherHandle& c, const char* op) const;
  void check_length(std::size_t length, const char* op) const;
  void check_multiplicable(const CipherHandle& c, const char* op) const;
  void note_level(int level);

  EngineParams params_;
  OpCounter counters_;
};

}  // namespace hrf
