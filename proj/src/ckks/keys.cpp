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

#include "hrf/ckks/keys.hpp"

#include "sampling.hpp"

namespace hrf::ckks {

namespace {

// out = -a * s + e, all NTT form over the same basis as a.
RnsPoly masked_secret(const Context& ctx, const RnsPoly& a, const RnsPoly& s, const RnsPoly& e) {
  RnsPoly out = e;
  for (std::size_t i = 0; i < a.count(); ++i) {
    const Modulus& q = ctx.modulus(a.basis[i]);
    auto o = out.component(i);
    auto ai = a.component(i);
    auto si = s.component(i);
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = q.sub(o[k], q.mul(ai[k], si[k]));
  }
  return out;
}

RnsPoly restrict_basis(const RnsPoly& poly, const std::vector<std::size_t>& basis) {
  RnsPoly out(poly.degree, basis, poly.ntt_form);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::size_t src = 0;
    while (poly.basis[src] != basis[i]) ++src;
    auto from = poly.component(src);
    std::copy(from.begin(), from.end(), out.component(i).begin());
  }
  return out;
}

}  // namespace

std::set<std::size_t> power_of_two_steps(std::size_t slot_count) {
  std::set<std::size_t> steps;
  for (std::size_t s = 1; s < slot_count; s <<= 1) steps.insert(s);
  return steps;
}

KeyGenerator::KeyGenerator(std::shared_ptr<const Context> context, std::uint64_t seed)
    : context_(std::move(context)), rng_(seed) {
  key_id_ = rng_();
  if (key_id_ == 0) key_id_ = 1;
  const Context& ctx = *context_;
  secret_.poly = detail::lift_small(ctx, detail::sample_ternary(ctx.degree(), rng_),
                                    extended_basis(ctx, ctx.max_level()));
}

PublicKey KeyGenerator::create_public_key() {
  const Context& ctx = *context_;
  const auto basis = level_basis(ctx.max_level());
  PublicKey pk;
  pk.a = detail::sample_uniform(ctx, basis, rng_);
  const auto e = detail::lift_small(ctx, detail::sample_gaussian(ctx.degree(), rng_), basis);
  pk.b = masked_secret(ctx, pk.a, restrict_basis(secret_.poly, basis), e);
  return pk;
}

KeySwitchKey KeyGenerator::create_switch_key(const RnsPoly& target) {
  const Context& ctx = *context_;
  const auto basis = extended_basis(ctx, ctx.max_level());
  KeySwitchKey key;
  for (int j = 0; j <= ctx.max_level(); ++j) {
    RnsPoly a = detail::sample_uniform(ctx, basis, rng_);
    const auto e = detail::lift_small(ctx, detail::sample_gaussian(ctx.degree(), rng_), basis);
    RnsPoly b = masked_secret(ctx, a, secret_.poly, e);
    const std::size_t jj = static_cast<std::size_t>(j);
    const Modulus& q = ctx.modulus(jj);
    const u64 p_mod = ctx.special_mod(jj);
    auto bj = b.component(jj);
    auto tj = target.component(jj);
    for (std::size_t k = 0; k < bj.size(); ++k) bj[k] = q.add(bj[k], q.mul(p_mod, tj[k]));
    key.b.push_back(std::move(b));
    key.a.push_back(std::move(a));
  }
  return key;
}

KeySwitchKey KeyGenerator::create_relin_key() {
  const Context& ctx = *context_;
  RnsPoly s2 = secret_.poly;
  for (std::size_t i = 0; i < s2.count(); ++i) {
    const Modulus& q = ctx.modulus(s2.basis[i]);
    for (auto& v : s2.component(i)) v = q.mul(v, v);
  }
  return create_switch_key(s2);
}

GaloisKeys KeyGenerator::create_galois_keys(const std::set<std::size_t>& steps) {
  const Context& ctx = *context_;
  GaloisKeys keys;
  for (std::size_t step : steps) {
    const std::size_t reduced = step % ctx.slot_count();
    if (reduced == 0) continue;
    keys.steps.insert(reduced);
    const u64 g = ctx.galois_element(reduced);
    if (keys.keys.count(g)) continue;
    const auto perm = ctx.galois_ntt_permutation(g);
    RnsPoly rotated = secret_.poly;
    for (std::size_t i = 0; i < rotated.count(); ++i) {
      auto src = secret_.poly.component(i);
      auto dst = rotated.component(i);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = src[perm[k]];
    }
    keys.keys.emplace(g, create_switch_key(rotated));
  }
  return keys;
}

KeySet KeyGenerator::create_key_set(const std::set<std::size_t>& rotation_steps) {
  KeySet set;
  set.id = key_id_;
  set.secret = secret_;
  set.public_key = create_public_key();
  set.relin = create_relin_key();
  set.galois = create_galois_keys(rotation_steps);
  return set;
}

}  // namespace hrf::ckks
