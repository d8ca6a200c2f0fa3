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

#include "hrf/ckks/context.hpp"

#include <cmath>
#include <numbers>

#include "hrf/error.hpp"

namespace hrf::ckks {

Context::Context(const CkksParameters& params) : params_(params), degree_(params.degree()) {
  if (params.log_degree < 3 || params.log_degree > 17) {
    throw ValidationError("log_degree must lie in [3, 17]");
  }
  if (params.depth < 0) throw ValidationError("depth must be non-negative");
  if (params.scale_bits < 20 || params.scale_bits > 58) {
    throw ValidationError("scale_bits must lie in [20, 58]");
  }
  if (params.base_prime_bits <= params.scale_bits || params.base_prime_bits > 60 ||
      params.special_prime_bits > 60) {
    throw ValidationError("base/special prime sizes must exceed the scale and be at most 60 bits");
  }
  const u64 step = 2 * degree_;
  auto big = find_ntt_primes_below(params.base_prime_bits, step, 1);
  auto special = params.special_prime_bits == params.base_prime_bits
                     ? find_ntt_primes_below(params.special_prime_bits, step, 1, big)
                     : find_ntt_primes_below(params.special_prime_bits, step, 1);
  auto middle = find_ntt_primes_near(params.scale_bits, step, params.depth, {big[0], special[0]});

  moduli_.emplace_back(big[0]);
  for (u64 p : middle) moduli_.emplace_back(p);
  moduli_.emplace_back(special[0]);

  for (const auto& m : moduli_) ntt_.push_back(std::make_unique<NttTables>(degree_, m));

  const std::size_t chain = static_cast<std::size_t>(params.depth) + 1;
  inv_last_prime_.resize(chain);
  for (std::size_t level = 1; level < chain; ++level) {
    for (std::size_t i = 0; i < level; ++i) {
      const u64 inv = moduli_[i].inverse(moduli_[i].reduce(moduli_[level].value()));
      inv_last_prime_[level].emplace_back(inv, moduli_[i].value());
    }
  }
  const u64 p = moduli_.back().value();
  for (std::size_t i = 0; i < chain; ++i) {
    const u64 pm = moduli_[i].reduce(p);
    special_mod_.push_back(pm);
    inv_special_.emplace_back(moduli_[i].inverse(pm), moduli_[i].value());
  }

  const std::size_t m = 2 * degree_;
  roots_.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    roots_[k] = {std::cos(angle), std::sin(angle)};
  }
  rotation_group_.resize(slot_count());
  std::size_t g = 1;
  for (std::size_t j = 0; j < slot_count(); ++j) {
    rotation_group_[j] = g;
    g = (g * 5) % m;
  }
}

double Context::default_scale() const { return std::ldexp(1.0, params_.scale_bits); }

std::vector<u64> Context::chain_values() const {
  std::vector<u64> out;
  for (const auto& m : moduli_) out.push_back(m.value());
  return out;
}

u64 Context::galois_element(std::size_t steps) const {
  return rotation_group_[steps % slot_count()];
}

std::vector<std::uint32_t> Context::galois_ntt_permutation(u64 galois_element) const {
  const int log_n = params_.log_degree;
  const u64 m = 2 * degree_;
  std::vector<std::uint32_t> perm(degree_);
  for (std::size_t i = 0; i < degree_; ++i) {
    // output slot i evaluates at psi^(2 rev(i) + 1); it reads the input slot
    // evaluating at psi^((2 rev(i) + 1) g)
    const u64 exponent = (2 * reverse_bits(i, log_n) + 1) * galois_element % m;
    perm[i] = static_cast<std::uint32_t>(reverse_bits((exponent - 1) / 2, log_n));
  }
  return perm;
}

std::vector<std::size_t> level_basis(int level) {
  std::vector<std::size_t> b(static_cast<std::size_t>(level) + 1);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = i;
  return b;
}

std::vector<std::size_t> extended_basis(const Context& context, int level) {
  auto b = level_basis(level);
  b.push_back(context.special_index());
  return b;
}

void to_ntt(const Context& context, RnsPoly& poly) {
  if (poly.ntt_form) return;
  for (std::size_t i = 0; i < poly.count(); ++i) context.ntt(poly.basis[i]).forward(poly.component(i));
  poly.ntt_form = true;
}

void from_ntt(const Context& context, RnsPoly& poly) {
  if (!poly.ntt_form) return;
  for (std::size_t i = 0; i < poly.count(); ++i) context.ntt(poly.basis[i]).inverse(poly.component(i));
  poly.ntt_form = false;
}

void truncate_basis(RnsPoly& poly, std::size_t count) {
  poly.basis.resize(count);
  poly.data.resize(count * poly.degree);
}

}  // namespace hrf::ckks
