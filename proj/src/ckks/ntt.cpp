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

#include "hrf/ckks/ntt.hpp"

#include <bit>

#include "hrf/error.hpp"

namespace hrf::ckks {

std::size_t reverse_bits(std::size_t value, int bit_count) {
  std::size_t r = 0;
  for (int i = 0; i < bit_count; ++i) {
    r = (r << 1) | ((value >> i) & 1);
  }
  return r;
}

NttTables::NttTables(std::size_t degree, const Modulus& modulus)
    : degree_(degree), modulus_(modulus) {
  if (!std::has_single_bit(degree) || degree < 2) {
    throw ValidationError("NTT degree must be a power of two");
  }
  log_degree_ = std::countr_zero(degree);
  psi_ = primitive_root_of_unity(2 * degree, modulus_);
  const u64 q = modulus_.value();
  const u64 psi_inv = modulus_.inverse(psi_);

  psi_rev_.resize(degree);
  psi_inv_rev_.resize(degree);
  u64 power = 1;
  u64 inv_power = 1;
  std::vector<u64> powers(degree), inv_powers(degree);
  for (std::size_t i = 0; i < degree; ++i) {
    powers[i] = power;
    inv_powers[i] = inv_power;
    power = modulus_.mul(power, psi_);
    inv_power = modulus_.mul(inv_power, psi_inv);
  }
  for (std::size_t i = 0; i < degree; ++i) {
    const std::size_t r = reverse_bits(i, log_degree_);
    psi_rev_[i] = ShoupOperand(powers[r], q);
    psi_inv_rev_[i] = ShoupOperand(inv_powers[r], q);
  }
  degree_inv_ = ShoupOperand(modulus_.inverse(degree), q);
}

void NttTables::forward(std::span<u64> a) const {
  // Harvey butterflies: values stay in [0, 4q) until the final pass.
  const u64 q = modulus_.value();
  const u64 two_q = 2 * q;
  std::size_t t = degree_;
  for (std::size_t m = 1; m < degree_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * t;
      const ShoupOperand& s = psi_rev_[m + i];
      u64* x = a.data() + j1;
      u64* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        u64 u = x[j];
        u -= (u >= two_q) ? two_q : 0;
        const u64 hi = static_cast<u64>((static_cast<u128>(y[j]) * s.quotient) >> 64);
        const u64 v = y[j] * s.value - hi * q;  // in [0, 2q)
        x[j] = u + v;
        y[j] = u + two_q - v;
      }
    }
  }
  for (auto& v : a) {
    v -= (v >= two_q) ? two_q : 0;
    v -= (v >= q) ? q : 0;
  }
}

void NttTables::inverse(std::span<u64> a) const {
  // Lazy Gentleman-Sande butterflies on values in [0, 2q).
  const u64 q = modulus_.value();
  const u64 two_q = 2 * q;
  std::size_t t = 1;
  for (std::size_t m = degree_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const ShoupOperand& s = psi_inv_rev_[h + i];
      u64* x = a.data() + j1;
      u64* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        const u64 u = x[j];
        const u64 v = y[j];
        u64 sum = u + v;
        sum -= (sum >= two_q) ? two_q : 0;
        x[j] = sum;
        const u64 d = u + two_q - v;
        const u64 hi = static_cast<u64>((static_cast<u128>(d) * s.quotient) >> 64);
        y[j] = d * s.value - hi * q;
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& v : a) {
    v -= (v >= q) ? q : 0;
    v = shoup_mul(v, degree_inv_, q);
  }
}

}  // namespace hrf::ckks
