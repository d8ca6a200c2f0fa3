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

#include "hrf/ckks/cipher.hpp"

#include "hrf/error.hpp"
#include "sampling.hpp"

namespace hrf::ckks {

Encryptor::Encryptor(std::shared_ptr<const Context> context, PublicKey public_key,
                     std::uint64_t key_id, std::uint64_t seed)
    : context_(std::move(context)), public_key_(std::move(public_key)), key_id_(key_id), rng_(seed) {}

Ciphertext Encryptor::encrypt(const Plaintext& plain) {
  const Context& ctx = *context_;
  const auto basis = level_basis(plain.level);
  const std::size_t count = basis.size();
  const auto u = detail::lift_small(ctx, detail::sample_ternary(ctx.degree(), rng_), basis);
  auto c0 = detail::lift_small(ctx, detail::sample_gaussian(ctx.degree(), rng_), basis);
  auto c1 = detail::lift_small(ctx, detail::sample_gaussian(ctx.degree(), rng_), basis);
  for (std::size_t i = 0; i < count; ++i) {
    const Modulus& q = ctx.modulus(i);
    auto b = public_key_.b.component(i);
    auto a = public_key_.a.component(i);
    auto ui = u.component(i);
    auto m = plain.poly.component(i);
    auto x0 = c0.component(i);
    auto x1 = c1.component(i);
    for (std::size_t k = 0; k < x0.size(); ++k) {
      x0[k] = q.add(q.add(x0[k], q.mul(b[k], ui[k])), m[k]);
      x1[k] = q.add(x1[k], q.mul(a[k], ui[k]));
    }
  }
  Ciphertext ct;
  ct.parts.push_back(std::move(c0));
  ct.parts.push_back(std::move(c1));
  ct.level = plain.level;
  ct.scale = plain.scale;
  ct.key_id = key_id_;
  return ct;
}

Plaintext Decryptor::decrypt(const Ciphertext& cipher) const {
  const Context& ctx = *context_;
  if (cipher.size() < 2) throw ValidationError("decrypt: ciphertext needs at least two parts");
  Plaintext plain;
  plain.level = cipher.level;
  plain.scale = cipher.scale;
  plain.poly = cipher.parts[0];
  for (std::size_t i = 0; i < plain.poly.count(); ++i) {
    const Modulus& q = ctx.modulus(i);
    auto out = plain.poly.component(i);
    auto s = secret_.poly.component(i);
    for (std::size_t k = 0; k < out.size(); ++k) {
      u64 acc = out[k];
      u64 s_pow = s[k];
      for (std::size_t p = 1; p < cipher.size(); ++p) {
        acc = q.add(acc, q.mul(cipher.parts[p].component(i)[k], s_pow));
        s_pow = q.mul(s_pow, s[k]);
      }
      out[k] = acc;
    }
  }
  return plain;
}

}  // namespace hrf::ckks
