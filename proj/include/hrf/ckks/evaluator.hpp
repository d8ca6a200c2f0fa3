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
#include <utility>

#include "hrf/ckks/cipher.hpp"

namespace hrf::ckks {

// Relative scale difference tolerated when adding ciphertexts. Rescaling by
// primes that are only close to 2^scale_bits makes product scales drift.
inline constexpr double kScaleTolerance = 1.0 / 1024.0;

// Stateless homomorphic operations. All inputs and outputs are NTT form.
class Evaluator {
 public:
  explicit Evaluator(std::shared_ptr<const Context> context) : context_(std::move(context)) {}

  const Context& context() const { return *context_; }

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext negate(const Ciphertext& a) const;
  Ciphertext add_plain(const Ciphertext& a, const Plaintext& p) const;

  // Tensor product, three parts, scale multiplies. No relinearization.
  Ciphertext multiply(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext relinearize(const Ciphertext& a, const KeySwitchKey& relin_key) const;
  Ciphertext multiply_plain(const Ciphertext& a, const Plaintext& p) const;

  // Divides by the last active prime with rounding, dropping one level.
  Ciphertext rescale(const Ciphertext& a) const;
  // Drops primes without dividing; the scale is unchanged.
  Ciphertext drop_to_level(const Ciphertext& a, int level) const;

  // Left rotation of the slot vector by `steps`.
  Ciphertext rotate(const Ciphertext& a, std::size_t steps, const GaloisKeys& keys) const;

  // (d0, d1) with d0 + d1 s ~= d s' for the key's target s'. d is NTT form
  // over q_0..q_level.
  std::pair<RnsPoly, RnsPoly> key_switch(const RnsPoly& d, int level, const KeySwitchKey& key) const;

 private:
  void check_compatible(const Ciphertext& a, const Ciphertext& b, const char* op) const;
  // Divides an NTT-form poly over basis (q_0..q_k, extra) by the extra
  // prime with rounding, returning a poly over q_0..q_k.
  RnsPoly divide_round_last(RnsPoly poly) const;

  std::shared_ptr<const Context> context_;
};

}  // namespace hrf::ckks
