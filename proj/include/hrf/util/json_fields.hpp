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

#include <string>

#include "hrf/error.hpp"
#include "json.hpp"

// Field access with path-qualified diagnostics for model and config files.
namespace hrf::json_fields {

using nlohmann::json;

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(path + "." + key + ": missing field");
  return *it;
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& path) {
  const json& v = member(j, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(path + "." + key + ": wrong type (" + std::string(v.type_name()) + ")");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key, path);
}

// Parses text, turning syntax errors into ValidationError with the position.
json parse(const std::string& text, const std::string& what);

}  // namespace hrf::json_fields
