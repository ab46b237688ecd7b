// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

// JSON mappings for the configuration structs. Readers reject unknown keys
// and wrong types with ValidationError naming the offending key.

#pragma once

#include <nlohmann/json.hpp>

#include "cothink/engine/sampler.hpp"
#include "cothink/errors.hpp"
#include "cothink/model/transformer.hpp"
#include "cothink/sched/group_config.hpp"

namespace cothink::sched {
void to_json(nlohmann::json& j, const GroupConfig& c);
void from_json(const nlohmann::json& j, GroupConfig& c);
}  // namespace cothink::sched

namespace cothink::engine {
void to_json(nlohmann::json& j, const SamplerConfig& c);
void from_json(const nlohmann::json& j, SamplerConfig& c);
}  // namespace cothink::engine

namespace cothink::model {
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
}  // namespace cothink::model

namespace cothink {

// Throws ValidationError("<where>: unknown key 'k'") for keys outside
// `allowed`.
void require_known_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                        const std::string& where);

// j[key] converted to T when present, `fallback` otherwise; a wrong type
// throws ValidationError naming where/key.
template <typename T>
T json_get(const nlohmann::json& j, const char* key, const T& fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

}  // namespace cothink
