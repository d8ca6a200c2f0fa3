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

#include "hrf/engine/ckks_engine.hpp"

#include <bit>
#include <cmath>

#include "hrf/error.hpp"

namespace hrf {

ckks::CkksParameters ckks_parameters(const EngineParams& params) {
  params.validate();
  ckks::CkksParameters p;
  p.log_degree = std::countr_zero(params.slot_count) + 1;
  p.depth = params.depth_budget;
  p.scale_bits = params.scale_bits;
  return p;
}

std::shared_ptr<const CkksKeyMaterial> CkksKeyMaterial::generate(const EngineParams& params, std::uint64_t seed,
                                                                 const std::set<std::size_t>& rotation_steps) {
  auto keys = std::make_shared<CkksKeyMaterial>();
  keys->context = std::make_shared<const ckks::Context>(ckks_parameters(params));
  ckks::KeyGenerator generator(keys->context, seed);
  keys->key_id = generator.key_id();
  keys->secret = generator.secret_key();
  keys->public_key = generator.create_public_key();
  keys->relin = generator.create_relin_key();
  std::set<std::size_t> steps;
  for (auto s : rotation_steps) {
    if (s % params.slot_count != 0) steps.insert(s % params.slot_count);
  }
  keys->galois = generator.create_galois_keys(steps);
  return keys;
}

CkksEngine::CkksEngine(EngineParams params, std::shared_ptr<const CkksKeyMaterial> keys,
                       std::uint64_t encrypt_seed)
    : SlotEngine(params),
      keys_(std::move(keys)),
      encoder_(keys_->context),
      evaluator_(keys_->context),
      encrypt_seed_(encrypt_seed),
      fork_rng_(encrypt_seed ^ 0x9e3779b97f4a7c15ULL) {
  if (keys_->context->params() != ckks_parameters(params)) {
    throw ConfigError("engine parameters do not match the key material");
  }
  if (keys_->public_key) encryptor_.emplace(keys_->context, *keys_->public_key, keys_->key_id, encrypt_seed);
  if (keys_->secret) decryptor_.emplace(keys_->context, *keys_->secret);
}

std::unique_ptr<SlotEngine> CkksEngine::fork() const {
  return std::make_unique<CkksEngine>(params(), keys_, fork_rng_());
}

CipherHandle CkksEngine::wrap(ckks::Ciphertext ct) const {
  if (ct.key_id != id()) throw KeyMismatchError("ciphertext was produced under different keys");
  const int level = ct.level;
  const double scale = ct.scale;
  return CipherHandle(std::move(ct), id(), level, scale);
}

const ckks::Ciphertext& CkksEngine::unwrap(const CipherHandle& c) { return std::get<ckks::Ciphertext>(c.payload()); }

CipherHandle CkksEngine::do_encode_encrypt(std::span<const double> values) {
  if (!encryptor_) throw KeyError("encode_encrypt: engine holds no public key");
  const auto plain = encoder_.encode(values, context().default_scale(), depth_budget());
  return wrap(encryptor_->encrypt(plain));
}

SlotVector CkksEngine::do_decrypt_decode(const CipherHandle& c) const {
  if (!decryptor_) throw KeyError("decrypt_decode: engine holds no secret key");
  return encoder_.decode(decryptor_->decrypt(unwrap(c)));
}

CipherHandle CkksEngine::do_add(const CipherHandle& a, const CipherHandle& b, bool subtract) {
  return wrap(subtract ? evaluator_.sub(unwrap(a), unwrap(b)) : evaluator_.add(unwrap(a), unwrap(b)));
}

CipherHandle CkksEngine::do_add_plain(const CipherHandle& a, std::span<const double> p, bool subtract) {
  const auto& ct = unwrap(a);
  SlotVector values(p.begin(), p.end());
  if (subtract) {
    for (auto& v : values) v = -v;
  }
  return wrap(evaluator_.add_plain(ct, encoder_.encode(values, ct.scale, ct.level)));
}

CipherHandle CkksEngine::do_mul_plain(const CipherHandle& c, std::span<const double> p) {
  // Encoding the plaintext at delta * q_l / scale makes the rescaled product
  // land exactly on the default scale, so later additions always align.
  const auto& ct = unwrap(c);
  const double q_last = static_cast<double>(context().modulus(static_cast<std::size_t>(ct.level)).value());
  const double plain_scale = context().default_scale() * q_last / ct.scale;
  auto product = evaluator_.multiply_plain(ct, encoder_.encode(p, plain_scale, ct.level));
  auto out = evaluator_.rescale(product);
  out.scale = context().default_scale();
  return wrap(std::move(out));
}

CipherHandle CkksEngine::do_mul_cipher(const CipherHandle& a, const CipherHandle& b) {
  if (!keys_->relin) throw KeyError("mul_cipher: engine holds no relinearization key");
  auto product = evaluator_.relinearize(evaluator_.multiply(unwrap(a), unwrap(b)), *keys_->relin);
  return wrap(evaluator_.rescale(product));
}

CipherHandle CkksEngine::do_rotate(const CipherHandle& c, std::size_t steps) {
  return wrap(evaluator_.rotate(unwrap(c), steps, keys_->galois));
}

CipherHandle CkksEngine::do_drop_level(const CipherHandle& c, int level) {
  return wrap(evaluator_.drop_to_level(unwrap(c), level));
}

}  // namespace hrf
