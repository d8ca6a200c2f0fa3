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

#include "hrf/ckks/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "hrf/error.hpp"

namespace hrf::ckks {

namespace {

constexpr std::array<char, 4> kMagic = {'H', 'R', 'F', 'K'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(T));
}

void put_double(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("unexpected end of file");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(bytes[i]) << (8 * i);
  return static_cast<T>(u);
}

double get_double(std::istream& in) { return std::bit_cast<double>(get<std::uint64_t>(in)); }

void write_header(std::ostream& out, const Context& ctx, BlobKind kind, std::uint64_t key_id) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
  const auto& p = ctx.params();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(p.log_degree));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(p.depth + 1));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(p.scale_bits));
  const auto moduli = ctx.chain_values();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(moduli.size()));
  for (u64 m : moduli) put<std::uint64_t>(out, m);
  put<std::uint64_t>(out, key_id);
}

std::uint64_t expect_header(std::istream& in, const Context& ctx, BlobKind kind) {
  const BlobHeader h = read_header(in);
  if (h.kind != kind) throw FormatError("unexpected blob kind " + std::to_string(static_cast<int>(h.kind)));
  if (h.moduli != ctx.chain_values() || h.params.log_degree != ctx.params().log_degree ||
      h.params.scale_bits != ctx.params().scale_bits) {
    throw FormatError("blob was produced under different encryption parameters");
  }
  return h.key_id;
}

void write_poly(std::ostream& out, const RnsPoly& poly) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(poly.count()));
  for (std::size_t i = 0; i < poly.count(); ++i) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(poly.basis[i]));
    put<std::uint8_t>(out, poly.ntt_form ? 1 : 0);
    for (u64 v : poly.component(i)) put<std::uint64_t>(out, v);
  }
}

RnsPoly read_poly(std::istream& in, const Context& ctx) {
  const auto count = get<std::uint32_t>(in);
  if (count == 0 || count > ctx.modulus_count()) throw FormatError("bad component count");
  RnsPoly poly(ctx.degree(), std::vector<std::size_t>(count), true);
  for (std::size_t i = 0; i < count; ++i) {
    const auto index = get<std::uint32_t>(in);
    if (index >= ctx.modulus_count()) throw FormatError("bad basis index");
    poly.basis[i] = index;
    poly.ntt_form = get<std::uint8_t>(in) != 0;
    const u64 q = ctx.modulus(index).value();
    for (auto& v : poly.component(i)) {
      v = get<std::uint64_t>(in);
      if (v >= q) throw FormatError("residue out of range");
    }
  }
  return poly;
}

void write_switch_key(std::ostream& out, const KeySwitchKey& key) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(key.b.size()));
  for (std::size_t j = 0; j < key.b.size(); ++j) {
    write_poly(out, key.b[j]);
    write_poly(out, key.a[j]);
  }
}

KeySwitchKey read_switch_key(std::istream& in, const Context& ctx) {
  KeySwitchKey key;
  const auto digits = get<std::uint32_t>(in);
  if (digits != static_cast<std::uint32_t>(ctx.max_level() + 1)) throw FormatError("bad digit count");
  for (std::uint32_t j = 0; j < digits; ++j) {
    key.b.push_back(read_poly(in, ctx));
    key.a.push_back(read_poly(in, ctx));
  }
  return key;
}

}  // namespace

BlobHeader read_header(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw FormatError("bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kFormatVersion) throw FormatError("unsupported format version " + std::to_string(version));
  BlobHeader h;
  h.kind = static_cast<BlobKind>(get<std::uint32_t>(in));
  h.params.log_degree = static_cast<int>(get<std::uint32_t>(in));
  h.params.depth = static_cast<int>(get<std::uint32_t>(in)) - 1;
  h.params.scale_bits = static_cast<int>(get<std::uint32_t>(in));
  const auto count = get<std::uint32_t>(in);
  if (count > 256) throw FormatError("bad modulus count");
  for (std::uint32_t i = 0; i < count; ++i) h.moduli.push_back(get<std::uint64_t>(in));
  if (!h.moduli.empty()) {
    h.params.base_prime_bits = std::bit_width(h.moduli.front());
    h.params.special_prime_bits = std::bit_width(h.moduli.back());
  }
  h.key_id = get<std::uint64_t>(in);
  return h;
}

void write_ciphertexts(std::ostream& out, const Context& ctx, const std::vector<Ciphertext>& cts) {
  write_header(out, ctx, BlobKind::kCiphertexts, cts.empty() ? 0 : cts.front().key_id);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cts.size()));
  for (const auto& ct : cts) {
    put<std::uint64_t>(out, ct.key_id);
    put<std::int32_t>(out, ct.level);
    put_double(out, ct.scale);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ct.parts.size()));
    for (const auto& p : ct.parts) write_poly(out, p);
  }
}

std::vector<Ciphertext> read_ciphertexts(std::istream& in, const Context& ctx) {
  expect_header(in, ctx, BlobKind::kCiphertexts);
  const auto n = get<std::uint32_t>(in);
  std::vector<Ciphertext> cts;
  for (std::uint32_t c = 0; c < n; ++c) {
    Ciphertext ct;
    ct.key_id = get<std::uint64_t>(in);
    ct.level = get<std::int32_t>(in);
    if (ct.level < 0 || ct.level > ctx.max_level()) throw FormatError("bad ciphertext level");
    ct.scale = get_double(in);
    const auto parts = get<std::uint32_t>(in);
    if (parts < 2 || parts > 3) throw FormatError("bad ciphertext size");
    for (std::uint32_t p = 0; p < parts; ++p) {
      ct.parts.push_back(read_poly(in, ctx));
      if (ct.parts.back().count() != static_cast<std::size_t>(ct.level) + 1) {
        throw FormatError("ciphertext component count does not match its level");
      }
    }
    cts.push_back(std::move(ct));
  }
  return cts;
}

void write_public_key(std::ostream& out, const Context& ctx, const PublicKey& key, std::uint64_t key_id) {
  write_header(out, ctx, BlobKind::kPublicKey, key_id);
  write_poly(out, key.b);
  write_poly(out, key.a);
}

PublicKey read_public_key(std::istream& in, const Context& ctx, std::uint64_t* key_id) {
  const auto id = expect_header(in, ctx, BlobKind::kPublicKey);
  if (key_id) *key_id = id;
  PublicKey key;
  key.b = read_poly(in, ctx);
  key.a = read_poly(in, ctx);
  return key;
}

void write_secret_key(std::ostream& out, const Context& ctx, const SecretKey& key, std::uint64_t key_id) {
  write_header(out, ctx, BlobKind::kSecretKey, key_id);
  write_poly(out, key.poly);
}

SecretKey read_secret_key(std::istream& in, const Context& ctx, std::uint64_t* key_id) {
  const auto id = expect_header(in, ctx, BlobKind::kSecretKey);
  if (key_id) *key_id = id;
  return SecretKey{read_poly(in, ctx)};
}

void write_relin_key(std::ostream& out, const Context& ctx, const KeySwitchKey& key, std::uint64_t key_id) {
  write_header(out, ctx, BlobKind::kRelinKey, key_id);
  write_switch_key(out, key);
}

KeySwitchKey read_relin_key(std::istream& in, const Context& ctx, std::uint64_t* key_id) {
  const auto id = expect_header(in, ctx, BlobKind::kRelinKey);
  if (key_id) *key_id = id;
  return read_switch_key(in, ctx);
}

void write_galois_keys(std::ostream& out, const Context& ctx, const GaloisKeys& keys, std::uint64_t key_id) {
  write_header(out, ctx, BlobKind::kGaloisKeys, key_id);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(keys.steps.size()));
  for (auto s : keys.steps) put<std::uint64_t>(out, s);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(keys.keys.size()));
  for (const auto& [g, key] : keys.keys) {
    put<std::uint64_t>(out, g);
    write_switch_key(out, key);
  }
}

GaloisKeys read_galois_keys(std::istream& in, const Context& ctx, std::uint64_t* key_id) {
  const auto id = expect_header(in, ctx, BlobKind::kGaloisKeys);
  if (key_id) *key_id = id;
  GaloisKeys keys;
  const auto nsteps = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < nsteps; ++i) keys.steps.insert(get<std::uint64_t>(in));
  const auto nkeys = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < nkeys; ++i) {
    const auto g = get<std::uint64_t>(in);
    keys.keys.emplace(g, read_switch_key(in, ctx));
  }
  return keys;
}

}  // namespace hrf::ckks
