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
#include <vector>

namespace hrf::ckks {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Word-sized prime modulus (< 2^61) with a precomputed Barrett constant
// floor(2^128 / q) split into two words.
class Modulus {
 public:
  Modulus() = default;
  explicit Modulus(u64 value);

  u64 value() const { return value_; }
  int bit_count() const { return bits_; }

  // x must be < q^2 (any 128-bit product of two reduced operands).
  u64 reduce128(u128 x) const {
    const u64 lo = static_cast<u64>(x);
    const u64 hi = static_cast<u64>(x >> 64);
    const u64 carry0 = static_cast<u64>((static_cast<u128>(lo) * ratio_lo_) >> 64);
    const u128 t0 = static_cast<u128>(lo) * ratio_hi_;
    const u128 s0 = static_cast<u128>(static_cast<u64>(t0)) + carry0;
    const u64 mid = static_cast<u64>(s0);
    const u64 top0 = static_cast<u64>(t0 >> 64) + static_cast<u64>(s0 >> 64);
    const u128 t1 = static_cast<u128>(hi) * ratio_lo_;
    const u128 s1 = static_cast<u128>(mid) + static_cast<u64>(t1);
    const u64 carry1 = static_cast<u64>(t1 >> 64) + static_cast<u64>(s1 >> 64);
    const u64 quotient = hi * ratio_hi_ + top0 + carry1;
    const u64 r = lo - quotient * value_;
    return r >= value_ ? r - value_ : r;
  }

  u64 reduce(u64 x) const { return reduce128(x); }

  u64 mul(u64 a, u64 b) const { return reduce128(static_cast<u128>(a) * b); }
  u64 add(u64 a, u64 b) const {
    const u64 s = a + b;
    return s >= value_ ? s - value_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + value_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : value_ - a; }

  // Maps a signed integer into [0, q).
  u64 from_signed(std::int64_t x) const {
    if (x >= 0) return reduce(static_cast<u64>(x));
    const u64 r = reduce(static_cast<u64>(-(x + 1)) + 1);
    return neg(r);
  }

  u64 pow(u64 base, u64 exponent) const;
  u64 inverse(u64 a) const;

 private:
  u64 value_ = 0;
  u64 ratio_lo_ = 0;
  u64 ratio_hi_ = 0;
  int bits_ = 0;
};

// Multiplication by a fixed operand w with precomputed floor(w * 2^64 / q).
struct ShoupOperand {
  u64 value = 0;
  u64 quotient = 0;

  ShoupOperand() = default;
  ShoupOperand(u64 w, u64 q)
      : value(w), quotient(static_cast<u64>((static_cast<u128>(w) << 64) / q)) {}
};

inline u64 shoup_mul(u64 x, const ShoupOperand& w, u64 q) {
  const u64 hi = static_cast<u64>((static_cast<u128>(x) * w.quotient) >> 64);
  const u64 r = x * w.value - hi * q;
  return r >= q ? r - q : r;
}

bool is_prime(u64 n);

// Returns `count` distinct primes congruent to 1 mod `modulus_step`, with
// `bits` significant bits, alternating above and below 2^bits so that their
// product stays close to 2^(bits * count). Primes in `exclude` are skipped.
std::vector<u64> find_ntt_primes_near(int bits, u64 modulus_step, int count,
                                      const std::vector<u64>& exclude = {});

// Largest primes below 2^bits congruent to 1 mod `modulus_step`.
std::vector<u64> find_ntt_primes_below(int bits, u64 modulus_step, int count,
                                       const std::vector<u64>& exclude = {});

// A generator of the multiplicative group's 2N-th roots: returns a primitive
// `order`-th root of unity modulo q (order must divide q - 1).
u64 primitive_root_of_unity(u64 order, const Modulus& q);

}  // namespace hrf::ckks
