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

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "hrf/ckks/modarith.hpp"
#include "hrf/ckks/ntt.hpp"

namespace hrf::ckks {

struct CkksParameters {
  int log_degree = 14;        // N = 2^log_degree, n = N/2 slots
  int depth = 10;             // number of rescalable 40-bit primes
  int scale_bits = 40;
  int base_prime_bits = 60;   // q_0, the decryption modulus at level 0
  int special_prime_bits = 60;

  std::size_t degree() const { return std::size_t{1} << log_degree; }
  std::size_t slot_count() const { return degree() / 2; }
  bool operator==(const CkksParameters&) const = default;
};

// Immutable parameter material: the modulus chain q_0 .. q_L plus the special
// key-switching prime P, NTT tables and precomputed RNS constants.
//
// Chain indices 0..L are the ciphertext primes; index L + 1 is P. A ciphertext
// at level l lives modulo q_0 * ... * q_l.
class Context {
 public:
  explicit Context(const CkksParameters& params);

  const CkksParameters& params() const { return params_; }
  std::size_t degree() const { return degree_; }
  std::size_t slot_count() const { return degree_ / 2; }
  int max_level() const { return params_.depth; }
  std::size_t special_index() const { return moduli_.size() - 1; }
  double default_scale() const;

  const Modulus& modulus(std::size_t index) const { return moduli_[index]; }
  const NttTables& ntt(std::size_t index) const { return *ntt_[index]; }
  std::size_t modulus_count() const { return moduli_.size(); }
  std::vector<u64> chain_values() const;

  // q_level^{-1} mod q_i, for i < level.
  const ShoupOperand& inv_last_prime(int level, std::size_t i) const {
    return inv_last_prime_[level][i];
  }
  // P^{-1} mod q_i.
  const ShoupOperand& inv_special_prime(std::size_t i) const { return inv_special_[i]; }
  // P mod q_i.
  u64 special_mod(std::size_t i) const { return special_mod_[i]; }

  // Encoder tables: zeta^k for k in [0, 2N], zeta = exp(i pi / N).
  const std::vector<std::complex<double>>& roots() const { return roots_; }
  // 5^j mod 2N for j in [0, n).
  const std::vector<std::size_t>& rotation_group() const { return rotation_group_; }

  // Galois element 5^steps mod 2N realizing a left rotation by `steps` slots.
  u64 galois_element(std::size_t steps) const;
  // Permutation p with (sigma_g a)[i] = a[p[i]] on bit-reversed NTT vectors.
  std::vector<std::uint32_t> galois_ntt_permutation(u64 galois_element) const;

 private:
  CkksParameters params_;
  std::size_t degree_;
  std::vector<Modulus> moduli_;
  std::vector<std::unique_ptr<NttTables>> ntt_;
  std::vector<std::vector<ShoupOperand>> inv_last_prime_;
  std::vector<ShoupOperand> inv_special_;
  std::vector<u64> special_mod_;
  std::vector<std::complex<double>> roots_;
  std::vector<std::size_t> rotation_group_;
};

// Residue-number-system polynomial: `count` residue vectors of N words each.
// Component i is modulo context.modulus(basis[i]); the basis is either the
// prefix q_0..q_l or the prefix followed by the special prime.
struct RnsPoly {
  std::size_t degree = 0;
  std::vector<std::size_t> basis;
  std::vector<u64> data;
  bool ntt_form = true;

  RnsPoly() = default;
  RnsPoly(std::size_t degree, std::vector<std::size_t> basis, bool ntt)
      : degree(degree), basis(std::move(basis)), data(degree * this->basis.size(), 0), ntt_form(ntt) {}

  std::size_t count() const { return basis.size(); }
  std::span<u64> component(std::size_t i) { return {data.data() + i * degree, degree}; }
  std::span<const u64> component(std::size_t i) const { return {data.data() + i * degree, degree}; }
  bool operator==(const RnsPoly&) const = default;
};

// Basis q_0..q_level.
std::vector<std::size_t> level_basis(int level);
// Basis q_0..q_level, P.
std::vector<std::size_t> extended_basis(const Context& context, int level);

void to_ntt(const Context& context, RnsPoly& poly);
void from_ntt(const Context& context, RnsPoly& poly);

// Keeps only the first `count` components.
void truncate_basis(RnsPoly& poly, std::size_t count);

}  // namespace hrf::ckks
