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

#include <memory>
#include <optional>
#include <random>
#include <set>

#include "hrf/ckks/evaluator.hpp"
#include "hrf/engine/slot_engine.hpp"

namespace hrf {

// Key material behind a CKKS engine. A server-side engine may hold only the
// evaluation keys; encryption needs the public key, decryption the secret key.
struct CkksKeyMaterial {
  std::shared_ptr<const ckks::Context> context;
  std::uint64_t key_id = 0;
  std::optional<ckks::SecretKey> secret;
  std::optional<ckks::PublicKey> public_key;
  std::optional<ckks::KeySwitchKey> relin;
  ckks::GaloisKeys galois;

  static std::shared_ptr<const CkksKeyMaterial> generate(const EngineParams& params, std::uint64_t seed,
                                                         const std::set<std::size_t>& rotation_steps);
};

ckks::CkksParameters ckks_parameters(const EngineParams& params);

class CkksEngine final : public SlotEngine {
 public:
  CkksEngine(EngineParams params, std::shared_ptr<const CkksKeyMaterial> keys, std::uint64_t encrypt_seed = 1);

  std::uint64_t id() const override { return keys_->key_id; }
  std::unique_ptr<SlotEngine> fork() const override;

  const CkksKeyMaterial& keys() const { return *keys_; }
  const ckks::Context& context() const { return *keys_->context; }

  // Raw ciphertext access for serialization across the client/server split.
  CipherHandle wrap(ckks::Ciphertext ct) const;
  static const ckks::Ciphertext& unwrap(const CipherHandle& c);

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
  std::shared_ptr<const CkksKeyMaterial> keys_;
  ckks::Encoder encoder_;
  ckks::Evaluator evaluator_;
  std::optional<ckks::Encryptor> encryptor_;
  std::optional<ckks::Decryptor> decryptor_;
  std::uint64_t encrypt_seed_;
  mutable std::mt19937_64 fork_rng_;
};

}  // namespace hrf
