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

#include <memory>
#include <string>
#include <vector>

#include "hrf/engine/ckks_engine.hpp"

// Key directories hold public.key, secret.key, relin.key and galois.key. A
// client keeps the secret key; a server only needs relin.key and galois.key.
namespace hrf {

enum KeyPart : unsigned {
  kPublicKeyPart = 1,
  kSecretKeyPart = 2,
  kRelinKeyPart = 4,
  kGaloisKeyPart = 8,
  kEvaluationKeyParts = kRelinKeyPart | kGaloisKeyPart,
  kAllKeyParts = 15,
};

void save_key_material(const CkksKeyMaterial& keys, const std::string& dir, unsigned parts = kAllKeyParts);

// Loads the requested parts; all must exist and share one key id.
std::shared_ptr<const CkksKeyMaterial> load_key_material(const std::string& dir, unsigned parts);

// Engine parameters implied by a key set's context.
EngineParams engine_params_for(const ckks::Context& context);

void save_ciphertexts(const std::string& path, const CkksEngine& engine, const std::vector<CipherHandle>& handles);
std::vector<CipherHandle> load_ciphertexts(const std::string& path, const CkksEngine& engine);

}  // namespace hrf
