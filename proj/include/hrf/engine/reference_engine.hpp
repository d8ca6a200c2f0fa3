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

#include <optional>
#include <set>

#include "hrf/engine/slot_engine.hpp"

namespace hrf {

// Exact double-precision simulator of the leveled SIMD contract. It tracks
// levels like the encrypted backend and, when given a rotation step set,
// rejects rotations that would lack a key.
class ReferenceEngine final : public SlotEngine {
 public:
  explicit ReferenceEngine(EngineParams params,
                           std::optional<std::set<std::size_t>> rotation_steps = std::nullopt);

  std::uint64_t id() const override { return id_; }
  std::unique_ptr<SlotEngine> fork() const override;

 protected:
  CipherHandle do_encode_encrypt(std::span<const double> values) override;
  SlotVector do_decrypt_decode(const CipherHandle& c) const override;
  CipherHandle do_add(const CipherHandle& a, const CipherHandle& b, bool subtract) override;
  CipherHandle do_add_plain(const CipherHandle& a, std::span<const double> p, bool subtract) override;
  CipherHandle do_mul_plain(const CipherHandle& c, std::span<const double> p) override;
  CipherHandle do_mul_cipher(const CipherHandle& a, const CipherHandle& b) override;
  CipherHandle do_rotate(const CipherHandle& c, std::size_t steps) override;
  CipherHandle do_drop_level(const CipherHandle& c, int level) override;

 private:
  ReferenceEngine(EngineParams params, std::optional<std::set<std::size_t>> steps, std::uint64_t id);
  CipherHandle make(SlotVector slots, int level) const;

  std::optional<std::set<std::size_t>> rotation_steps_;
  std::uint64_t id_;
};

}  // namespace hrf
