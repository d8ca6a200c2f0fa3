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
#include <random>
#include <vector>

#include "hrf/ckks/encoder.hpp"
#include "hrf/ckks/keys.hpp"

namespace hrf::ckks {

// (c_0, c_1[, c_2]) in NTT form over q_0..q_level.
struct Ciphertext {
  std::vector<RnsPoly> parts;
  int level = 0;
  double scale = 1.0;
  std::uint64_t key_id = 0;

  std::size_t size() const { return parts.size(); }
};

class Encryptor {
 public:
  Encryptor(std::shared_ptr<const Context> context, PublicKey public_key, std::uint64_t key_id,
            std::uint64_t seed);

  Ciphertext encrypt(const Plaintext& plain);

 private:
  std::shared_ptr<const Context> context_;
  PublicKey public_key_;
  std::uint64_t key_id_;
  std::mt19937_64 rng_;
};

class Decryptor {
 public:
  Decryptor(std::shared_ptr<const Context> context, SecretKey secret)
      : context_(std::move(context)), secret_(std::move(secret)) {}

  // c_0 + c_1 s (+ c_2 s^2) over the ciphertext's active primes.
  Plaintext decrypt(const Ciphertext& cipher) const;

 private:
  std::shared_ptr<const Context> context_;
  SecretKey secret_;
};

}  // namespace hrf::ckks
