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

#include "hrf/ckks/modarith.hpp"

#include <algorithm>
#include <bit>

#include "hrf/error.hpp"

namespace hrf::ckks {

Modulus::Modulus(u64 value) : value_(value) {
  if (value < 2 || value >= (u64{1} << 61)) {
    throw ValidationError("modulus must lie in [2, 2^61)");
  }
  bits_ = 64 - std::countl_zero(value);
  // floor((2^128 - 1) / q) == floor(2^128 / q) for any q that is not a power of two
  const u128 ratio = ~u128{0} / value;
  ratio_lo_ = static_cast<u64>(ratio);
  ratio_hi_ = static_cast<u64>(ratio >> 64);
}

u64 Modulus::pow(u64 base, u64 exponent) const {
  u64 result = 1 % value_;
  base = reduce(base);
  while (exponent > 0) {
    if (exponent & 1) result = mul(result, base);
    base = mul(base, base);
    exponent >>= 1;
  }
  return result;
}

u64 Modulus::inverse(u64 a) const {
  a = reduce(a);
  if (a == 0) throw ValidationError("zero has no modular inverse");
  // q is prime throughout this library
  return pow(a, value_ - 2);
}

namespace {

u64 mulmod_slow(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod_slow(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_slow(r, b, m);
    b = mulmod_slow(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // deterministic witness set for 64-bit integers
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod_slow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod_slow(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<u64> find_ntt_primes_near(int bits, u64 modulus_step, int count,
                                      const std::vector<u64>& exclude) {
  std::vector<u64> primes;
  const u64 center = u64{1} << bits;
  // candidates are 1 + k * step on both sides of 2^bits
  u64 up = center + 1;
  u64 down = center + 1 - modulus_step;
  auto usable = [&](u64 p) {
    return is_prime(p) && std::find(exclude.begin(), exclude.end(), p) == exclude.end() &&
           std::find(primes.begin(), primes.end(), p) == primes.end();
  };
  bool take_up = true;
  while (static_cast<int>(primes.size()) < count) {
    if (take_up) {
      while (!usable(up)) up += modulus_step;
      primes.push_back(up);
      up += modulus_step;
    } else {
      while (!usable(down)) down -= modulus_step;
      primes.push_back(down);
      down -= modulus_step;
    }
    take_up = !take_up;
  }
  return primes;
}

std::vector<u64> find_ntt_primes_below(int bits, u64 modulus_step, int count,
                                       const std::vector<u64>& exclude) {
  std::vector<u64> primes;
  u64 candidate = (u64{1} << bits) - modulus_step + 1;
  while (static_cast<int>(primes.size()) < count) {
    if (is_prime(candidate) &&
        std::find(exclude.begin(), exclude.end(), candidate) == exclude.end()) {
      primes.push_back(candidate);
    }
    candidate -= modulus_step;
  }
  return primes;
}

u64 primitive_root_of_unity(u64 order, const Modulus& q) {
  const u64 p = q.value();
  if ((p - 1) % order != 0) throw ValidationError("root order does not divide q - 1");
  // order is a power of two: g^((p-1)/order) is primitive iff its order/2 power is -1
  for (u64 g = 2; g < p; ++g) {
    const u64 root = q.pow(g, (p - 1) / order);
    if (q.pow(root, order / 2) == p - 1) return root;
  }
  throw ValidationError("no primitive root found");
}

}  // namespace hrf::ckks
