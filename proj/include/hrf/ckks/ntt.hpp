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

#include <span>
#include <vector>

#include "hrf/ckks/modarith.hpp"

namespace hrf::ckks {

// Negacyclic NTT over Z_q[X]/(X^N + 1).
//
// The forward transform leaves its output in bit-reversed order: entry i holds
// a(psi^(2 * bitrev(i) + 1)) where psi is a primitive 2N-th root of unity.
class NttTables {
 public:
  NttTables(std::size_t degree, const Modulus& modulus);

  std::size_t degree() const { return degree_; }
  const Modulus& modulus() const { return modulus_; }
  u64 psi() const { return psi_; }

  void forward(std::span<u64> values) const;
  void inverse(std::span<u64> values) const;

 private:
  std::size_t degree_;
  int log_degree_;
  Modulus modulus_;
  u64 psi_;
  std::vector<ShoupOperand> psi_rev_;
  std::vector<ShoupOperand> psi_inv_rev_;
  ShoupOperand degree_inv_;
};

std::size_t reverse_bits(std::size_t value, int bit_count);

}  // namespace hrf::ckks
