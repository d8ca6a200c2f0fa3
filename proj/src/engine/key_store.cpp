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

#include "hrf/engine/key_store.hpp"

#include <filesystem>
#include <fstream>

#include "hrf/ckks/serialize.hpp"
#include "hrf/error.hpp"

namespace hrf {

namespace {

namespace fs = std::filesystem;

std::string key_path(const std::string& dir, unsigned part) {
  switch (part) {
    case kPublicKeyPart: return (fs::path(dir) / "public.key").string();
    case kSecretKeyPart: return (fs::path(dir) / "secret.key").string();
    case kRelinKeyPart: return (fs::path(dir) / "relin.key").string();
    default: return (fs::path(dir) / "galois.key").string();
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void save_key_material(const CkksKeyMaterial& keys, const std::string& dir, unsigned parts) {
  fs::create_directories(dir);
  const auto& ctx = *keys.context;
  if ((parts & kPublicKeyPart) && keys.public_key) {
    auto out = open_out(key_path(dir, kPublicKeyPart));
    ckks::write_public_key(out, ctx, *keys.public_key, keys.key_id);
  }
  if ((parts & kSecretKeyPart) && keys.secret) {
    auto out = open_out(key_path(dir, kSecretKeyPart));
    ckks::write_secret_key(out, ctx, *keys.secret, keys.key_id);
  }
  if ((parts & kRelinKeyPart) && keys.relin) {
    auto out = open_out(key_path(dir, kRelinKeyPart));
    ckks::write_relin_key(out, ctx, *keys.relin, keys.key_id);
  }
  if (parts & kGaloisKeyPart) {
    auto out = open_out(key_path(dir, kGaloisKeyPart));
    ckks::write_galois_keys(out, ctx, keys.galois, keys.key_id);
  }
}

std::shared_ptr<const CkksKeyMaterial> load_key_material(const std::string& dir, unsigned parts) {
  if (parts == 0) throw ConfigError("load_key_material: no key parts requested");
  auto keys = std::make_shared<CkksKeyMaterial>();
  bool have_id = false;
  const auto check_id = [&](std::uint64_t id, const std::string& path) {
    if (have_id && id != keys->key_id) throw KeyMismatchError("'" + path + "' belongs to a different key set");
    keys->key_id = id;
    have_id = true;
  };
  for (unsigned part : {kPublicKeyPart, kSecretKeyPart, kRelinKeyPart, kGaloisKeyPart}) {
    if (!(parts & part)) continue;
    const std::string path = key_path(dir, part);
    auto in = open_in(path);
    if (!keys->context) {
      const auto header = ckks::read_header(in);
      keys->context = std::make_shared<const ckks::Context>(header.params);
      if (keys->context->chain_values() != header.moduli) {
        throw FormatError("'" + path + "': modulus chain cannot be reproduced");
      }
      in.seekg(0);
    }
    std::uint64_t id = 0;
    switch (part) {
      case kPublicKeyPart: keys->public_key = ckks::read_public_key(in, *keys->context, &id); break;
      case kSecretKeyPart: keys->secret = ckks::read_secret_key(in, *keys->context, &id); break;
      case kRelinKeyPart: keys->relin = ckks::read_relin_key(in, *keys->context, &id); break;
      default: keys->galois = ckks::read_galois_keys(in, *keys->context, &id); break;
    }
    check_id(id, path);
  }
  return keys;
}

EngineParams engine_params_for(const ckks::Context& context) {
  EngineParams p;
  p.slot_count = context.slot_count();
  p.depth_budget = context.max_level();
  p.scale_bits = context.params().scale_bits;
  p.backend = Backend::kCkks;
  return p;
}

void save_ciphertexts(const std::string& path, const CkksEngine& engine, const std::vector<CipherHandle>& handles) {
  std::vector<ckks::Ciphertext> cts;
  for (const auto& h : handles) {
    if (h.engine_id() != engine.id()) throw KeyMismatchError("save_ciphertexts: handle from different keys");
    cts.push_back(CkksEngine::unwrap(h));
  }
  auto out = open_out(path);
  ckks::write_ciphertexts(out, engine.context(), cts);
}

std::vector<CipherHandle> load_ciphertexts(const std::string& path, const CkksEngine& engine) {
  auto in = open_in(path);
  std::vector<CipherHandle> handles;
  for (auto& ct : ckks::read_ciphertexts(in, engine.context())) handles.push_back(engine.wrap(std::move(ct)));
  return handles;
}

}  // namespace hrf
