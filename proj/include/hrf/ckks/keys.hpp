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
#include <map>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "hrf/ckks/context.hpp"

namespace hrf::ckks {

struct SecretKey {
  RnsPoly poly;  // ternary, NTT form over q_0..q_L, P
};

struct PublicKey {
  RnsPoly b;  // -a s + e over q_0..q_L
  RnsPoly a;
};

// One (b_j, a_j) pair per chain prime q_j, each over q_0..q_L, P:
//   b_j = -a_j s + e_j + P s' [j-th CRT unit]
// so that sum_j [d]_{q_j} (b_j, a_j) decrypts to P d s' + small.
struct KeySwitchKey {
  std::vector<RnsPoly> b;
  std::vector<RnsPoly> a;
};

struct GaloisKeys {
  std::map<u64, KeySwitchKey> keys;  // galois element -> key
  std::set<std::size_t> steps;       // left-rotation amounts covered
};

// Full key material. `id` tags every ciphertext produced under these keys.
struct KeySet {
  std::uint64_t id = 0;
  SecretKey secret;
  PublicKey public_key;
  KeySwitchKey relin;
  GaloisKeys galois;
};

// Deterministic key generation: identical seeds yield identical keys.
class KeyGenerator {
 public:
  KeyGenerator(std::shared_ptr<const Context> context, std::uint64_t seed);

  SecretKey& secret_key() { return secret_; }
  std::uint64_t key_id() const { return key_id_; }
  PublicKey create_public_key();
  KeySwitchKey create_relin_key();
  GaloisKeys create_galois_keys(const std::set<std::size_t>& steps);

  KeySet create_key_set(const std::set<std::size_t>& rotation_steps);

 private:
  // Key-switching key from s' (NTT form over the full extended basis) to s.
  KeySwitchKey create_switch_key(const RnsPoly& target);

  std::shared_ptr<const Context> context_;
  std::mt19937_64 rng_;
  std::uint64_t key_id_;
  SecretKey secret_;
};

// Powers of two below the slot count; the default rotation set.
std::set<std::size_t> power_of_two_steps(std::size_t slot_count);

}  // namespace hrf::ckks
