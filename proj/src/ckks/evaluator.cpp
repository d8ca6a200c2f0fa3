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

#include "hrf/ckks/evaluator.hpp"

#include <cmath>
#include <string>

#include "hrf/error.hpp"

namespace hrf::ckks {

namespace {

template <typename Fn>
void for_each_residue(const Context& ctx, RnsPoly& out, Fn&& fn) {
  for (std::size_t i = 0; i < out.count(); ++i) fn(ctx.modulus(out.basis[i]), i);
}

}  // namespace

void Evaluator::check_compatible(const Ciphertext& a, const Ciphertext& b, const char* op) const {
  if (a.key_id != b.key_id) {
    throw KeyMismatchError(std::string(op) + ": operands were encrypted under different keys");
  }
  if (a.level != b.level) {
    throw AlignmentError(std::string(op) + ": level mismatch " + std::to_string(a.level) + " vs " +
                         std::to_string(b.level));
  }
}

Ciphertext Evaluator::add(const Ciphertext& a, const Ciphertext& b) const {
  check_compatible(a, b, "add");
  if (std::fabs(a.scale / b.scale - 1.0) > kScaleTolerance) {
    throw AlignmentError("add: scale mismatch 2^" + std::to_string(std::log2(a.scale)) + " vs 2^" +
                         std::to_string(std::log2(b.scale)));
  }
  const Ciphertext& big = a.size() >= b.size() ? a : b;
  const Ciphertext& small = a.size() >= b.size() ? b : a;
  Ciphertext out = big;
  out.scale = a.scale;
  for (std::size_t p = 0; p < small.size(); ++p) {
    for_each_residue(*context_, out.parts[p], [&](const Modulus& q, std::size_t i) {
      auto o = out.parts[p].component(i);
      auto s = small.parts[p].component(i);
      for (std::size_t k = 0; k < o.size(); ++k) o[k] = q.add(o[k], s[k]);
    });
  }
  return out;
}

Ciphertext Evaluator::negate(const Ciphertext& a) const {
  Ciphertext out = a;
  for (auto& part : out.parts) {
    for_each_residue(*context_, part, [&](const Modulus& q, std::size_t i) {
      for (auto& v : part.component(i)) v = q.neg(v);
    });
  }
  return out;
}

Ciphertext Evaluator::sub(const Ciphertext& a, const Ciphertext& b) const { return add(a, negate(b)); }

Ciphertext Evaluator::add_plain(const Ciphertext& a, const Plaintext& p) const {
  if (p.level < a.level) throw AlignmentError("add_plain: plaintext level below ciphertext level");
  if (std::fabs(a.scale / p.scale - 1.0) > kScaleTolerance) {
    throw AlignmentError("add_plain: scale mismatch");
  }
  Ciphertext out = a;
  for_each_residue(*context_, out.parts[0], [&](const Modulus& q, std::size_t i) {
    auto o = out.parts[0].component(i);
    auto m = p.poly.component(i);
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = q.add(o[k], m[k]);
  });
  return out;
}

Ciphertext Evaluator::multiply(const Ciphertext& a, const Ciphertext& b) const {
  check_compatible(a, b, "multiply");
  if (a.size() != 2 || b.size() != 2) throw ValidationError("multiply: operands must be relinearized");
  Ciphertext out;
  out.level = a.level;
  out.scale = a.scale * b.scale;
  out.key_id = a.key_id;
  const auto basis = level_basis(a.level);
  for (int p = 0; p < 3; ++p) out.parts.emplace_back(context_->degree(), basis, true);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Modulus& q = context_->modulus(i);
    auto a0 = a.parts[0].component(i), a1 = a.parts[1].component(i);
    auto b0 = b.parts[0].component(i), b1 = b.parts[1].component(i);
    auto d0 = out.parts[0].component(i), d1 = out.parts[1].component(i), d2 = out.parts[2].component(i);
    for (std::size_t k = 0; k < d0.size(); ++k) {
      d0[k] = q.mul(a0[k], b0[k]);
      d1[k] = q.reduce128(static_cast<u128>(a0[k]) * b1[k] + static_cast<u128>(a1[k]) * b0[k]);
      d2[k] = q.mul(a1[k], b1[k]);
    }
  }
  return out;
}

Ciphertext Evaluator::multiply_plain(const Ciphertext& a, const Plaintext& p) const {
  if (p.level < a.level) throw AlignmentError("multiply_plain: plaintext level below ciphertext level");
  Ciphertext out = a;
  out.scale = a.scale * p.scale;
  for (auto& part : out.parts) {
    for_each_residue(*context_, part, [&](const Modulus& q, std::size_t i) {
      auto o = part.component(i);
      auto m = p.poly.component(i);
      for (std::size_t k = 0; k < o.size(); ++k) o[k] = q.mul(o[k], m[k]);
    });
  }
  return out;
}

std::pair<RnsPoly, RnsPoly> Evaluator::key_switch(const RnsPoly& d, int level,
                                                   const KeySwitchKey& key) const {
  const Context& ctx = *context_;
  const std::size_t n = ctx.degree();
  const auto basis = extended_basis(ctx, level);
  const std::size_t count = basis.size();
  const std::size_t special_component = static_cast<std::size_t>(ctx.max_level()) + 1;

  RnsPoly d_coeff = d;
  from_ntt(ctx, d_coeff);

  std::vector<u128> acc0(count * n, 0), acc1(count * n, 0);
  std::vector<u64> lifted(n);
  for (int j = 0; j <= level; ++j) {
    const std::size_t jj = static_cast<std::size_t>(j);
    auto digit = d_coeff.component(jj);
    for (std::size_t t = 0; t < count; ++t) {
      const std::size_t prime = basis[t];
      const std::size_t key_component = t + 1 == count ? special_component : t;
      const u64* src;
      if (t == jj) {
        src = d.component(jj).data();
      } else {
        const Modulus& q = ctx.modulus(prime);
        for (std::size_t k = 0; k < n; ++k) lifted[k] = q.reduce(digit[k]);
        ctx.ntt(prime).forward(lifted);
        src = lifted.data();
      }
      const u64* kb = key.b[jj].component(key_component).data();
      const u64* ka = key.a[jj].component(key_component).data();
      u128* a0 = acc0.data() + t * n;
      u128* a1 = acc1.data() + t * n;
      for (std::size_t k = 0; k < n; ++k) {
        a0[k] += static_cast<u128>(src[k]) * kb[k];
        a1[k] += static_cast<u128>(src[k]) * ka[k];
      }
    }
  }

  RnsPoly r0(n, basis, true), r1(n, basis, true);
  for (std::size_t t = 0; t < count; ++t) {
    const Modulus& q = ctx.modulus(basis[t]);
    auto o0 = r0.component(t), o1 = r1.component(t);
    for (std::size_t k = 0; k < n; ++k) {
      o0[k] = q.reduce128(acc0[t * n + k]);
      o1[k] = q.reduce128(acc1[t * n + k]);
    }
  }
  return {divide_round_last(std::move(r0)), divide_round_last(std::move(r1))};
}

RnsPoly Evaluator::divide_round_last(RnsPoly poly) const {
  const Context& ctx = *context_;
  const std::size_t n = ctx.degree();
  const std::size_t last_index = poly.count() - 1;
  const std::size_t last_prime = poly.basis[last_index];
  const bool special = last_prime == ctx.special_index();
  const Modulus& ql = ctx.modulus(last_prime);

  std::vector<u64> last(poly.component(last_index).begin(), poly.component(last_index).end());
  ctx.ntt(last_prime).inverse(last);
  const u64 half = ql.value() >> 1;
  for (auto& v : last) v = ql.add(v, half);

  std::vector<u64> tmp(n);
  for (std::size_t i = 0; i < last_index; ++i) {
    const std::size_t prime = poly.basis[i];
    const Modulus& q = ctx.modulus(prime);
    const u64 half_mod = q.reduce(half);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = q.sub(q.reduce(last[k]), half_mod);
    ctx.ntt(prime).forward(tmp);
    const ShoupOperand& inv =
        special ? ctx.inv_special_prime(prime) : ctx.inv_last_prime(static_cast<int>(last_prime), prime);
    auto comp = poly.component(i);
    for (std::size_t k = 0; k < n; ++k) comp[k] = shoup_mul(q.sub(comp[k], tmp[k]), inv, q.value());
  }
  truncate_basis(poly, last_index);
  return poly;
}

Ciphertext Evaluator::relinearize(const Ciphertext& a, const KeySwitchKey& relin_key) const {
  if (a.size() == 2) return a;
  if (a.size() != 3) throw ValidationError("relinearize: expected three parts");
  auto [d0, d1] = key_switch(a.parts[2], a.level, relin_key);
  Ciphertext out;
  out.level = a.level;
  out.scale = a.scale;
  out.key_id = a.key_id;
  out.parts = {a.parts[0], a.parts[1]};
  for (std::size_t i = 0; i < d0.count(); ++i) {
    const Modulus& q = context_->modulus(i);
    auto o0 = out.parts[0].component(i), o1 = out.parts[1].component(i);
    auto x0 = d0.component(i), x1 = d1.component(i);
    for (std::size_t k = 0; k < o0.size(); ++k) {
      o0[k] = q.add(o0[k], x0[k]);
      o1[k] = q.add(o1[k], x1[k]);
    }
  }
  return out;
}

Ciphertext Evaluator::rescale(const Ciphertext& a) const {
  if (a.level < 1) throw DepthBudgetError("rescale: ciphertext is already at level 0");
  Ciphertext out;
  out.level = a.level - 1;
  out.scale = a.scale / static_cast<double>(context_->modulus(static_cast<std::size_t>(a.level)).value());
  out.key_id = a.key_id;
  for (const auto& part : a.parts) out.parts.push_back(divide_round_last(part));
  return out;
}

Ciphertext Evaluator::drop_to_level(const Ciphertext& a, int level) const {
  if (level > a.level || level < 0) throw AlignmentError("drop_to_level: target level out of range");
  Ciphertext out = a;
  out.level = level;
  for (auto& part : out.parts) truncate_basis(part, static_cast<std::size_t>(level) + 1);
  return out;
}

Ciphertext Evaluator::rotate(const Ciphertext& a, std::size_t steps, const GaloisKeys& keys) const {
  const Context& ctx = *context_;
  steps %= ctx.slot_count();
  if (steps == 0) return a;
  if (a.size() != 2) throw ValidationError("rotate: ciphertext must be relinearized");
  const u64 g = ctx.galois_element(steps);
  auto it = keys.keys.find(g);
  if (it == keys.keys.end()) {
    throw KeyError("rotate: no rotation key for step " + std::to_string(steps));
  }
  const auto perm = ctx.galois_ntt_permutation(g);
  Ciphertext rotated = a;
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t i = 0; i < a.parts[p].count(); ++i) {
      auto src = a.parts[p].component(i);
      auto dst = rotated.parts[p].component(i);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = src[perm[k]];
    }
  }
  auto [d0, d1] = key_switch(rotated.parts[1], a.level, it->second);
  for (std::size_t i = 0; i < d0.count(); ++i) {
    const Modulus& q = ctx.modulus(i);
    auto o0 = rotated.parts[0].component(i);
    auto x0 = d0.component(i);
    for (std::size_t k = 0; k < o0.size(); ++k) o0[k] = q.add(o0[k], x0[k]);
  }
  rotated.parts[1] = std::move(d1);
  return rotated;
}

}  // namespace hrf::ckks
