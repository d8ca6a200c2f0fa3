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
#include <iosfwd>
#include <string>
#include <vector>

#include "hrf/ckks/cipher.hpp"

// Versioned little-endian binary format for keys and ciphertexts.
//
//   magic "HRFK" | u32 version | u32 kind | u32 log_degree | u32 chain_length
//   | u32 scale_bits | u32 modulus_count | u64 moduli[] | u64 key_id | payload
//
// Polynomials are stored as u32 component count, then per component the u32
// basis index, a u8 NTT flag and N u64 residues.
namespace hrf::ckks {

inline constexpr std::uint32_t kFormatVersion = 1;

enum class BlobKind : std::uint32_t {
  kCiphertexts = 1,
  kPublicKey = 2,
  kSecretKey = 3,
  kRelinKey = 4,
  kGaloisKeys = 5,
};

struct BlobHeader {
  BlobKind kind{};
  CkksParameters params;
  std::vector<u64> moduli;
  std::uint64_t key_id = 0;
};

// Reads only the header; used to rebuild a Context before the payload.
BlobHeader read_header(std::istream& in);

void write_ciphertexts(std::ostream& out, const Context& ctx, const std::vector<Ciphertext>& cts);
std::vector<Ciphertext> read_ciphertexts(std::istream& in, const Context& ctx);

void write_public_key(std::ostream& out, const Context& ctx, const PublicKey& key, std::uint64_t key_id);
PublicKey read_public_key(std::istream& in, const Context& ctx, std::uint64_t* key_id = nullptr);

void write_secret_key(std::ostream& out, const Context& ctx, const SecretKey& key, std::uint64_t key_id);
SecretKey read_secret_key(std::istream& in, const Context& ctx, std::uint64_t* key_id = nullptr);

void write_relin_key(std::ostream& out, const Context& ctx, const KeySwitchKey& key, std::uint64_t key_id);
KeySwitchKey read_relin_key(std::istream& in, const Context& ctx, std::uint64_t* key_id = nullptr);

void write_galois_keys(std::ostream& out, const Context& ctx, const GaloisKeys& keys, std::uint64_t key_id);
GaloisKeys read_galois_keys(std::istream& in, const Context& ctx, std::uint64_t* key_id = nullptr);

}  // namespace hrf::ckks
