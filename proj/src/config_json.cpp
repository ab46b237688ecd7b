// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/config_json.hpp"

#include <algorithm>
#include <cstring>

#include "cothink/errors.hpp"

namespace cothink {

void require_known_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                        const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace cothink

namespace cothink::sched {

void to_json(nlohmann::json& j, const GroupConfig& c) {
  j = {{"n_agents", c.n_agents},
       {"budget", c.budget},
       {"mode", std::string(mode_name(c.mode))},
       {"prompt_len", c.prompt_len},
       {"agent_prompt_len", c.agent_prompt_len}};
}

void from_json(const nlohmann::json& j, GroupConfig& c) {
  require_known_keys(j, {"n_agents", "budget", "mode", "prompt_len", "agent_prompt_len"}, "group");
  c.n_agents = json_get(j, "n_agents", c.n_agents, "group");
  c.budget = json_get(j, "budget", c.budget, "group");
  c.mode = parse_mode(json_get(j, "mode", std::string(mode_name(c.mode)), "group"));
  c.prompt_len = json_get(j, "prompt_len", c.prompt_len, "group");
  c.agent_prompt_len = json_get(j, "agent_prompt_len", c.agent_prompt_len, "group");
}

}  // namespace cothink::sched

namespace cothink::engine {

void to_json(nlohmann::json& j, const SamplerConfig& c) {
  j = {{"temperature", c.temperature},
       {"seed", c.seed},
       {"per_agent_streams", c.per_agent_streams}};
}

void from_json(const nlohmann::json& j, SamplerConfig& c) {
  require_known_keys(j, {"temperature", "seed", "per_agent_streams"}, "sampler");
  c.temperature = json_get(j, "temperature", c.temperature, "sampler");
  c.seed = json_get(j, "seed", c.seed, "sampler");
  c.per_agent_streams = json_get(j, "per_agent_streams", c.per_agent_streams, "sampler");
}

}  // namespace cothink::engine

namespace cothink::model {

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"num_layers", c.num_layers},       {"num_heads", c.num_heads},
       {"head_dim", c.head_dim},           {"vocab_size", c.vocab_size},
       {"rotary_base", c.rotary_base},     {"seed", c.seed},
       {"model_width", c.model_width},     {"ffn_multiplier", c.ffn_multiplier}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  require_known_keys(j,
                     {"num_layers", "num_heads", "head_dim", "vocab_size", "rotary_base", "seed",
                      "model_width", "ffn_multiplier", "checkpoint"},
                     "model");
  c.num_layers = json_get(j, "num_layers", c.num_layers, "model");
  c.num_heads = json_get(j, "num_heads", c.num_heads, "model");
  c.head_dim = json_get(j, "head_dim", c.head_dim, "model");
  c.vocab_size = json_get(j, "vocab_size", c.vocab_size, "model");
  c.rotary_base = json_get(j, "rotary_base", c.rotary_base, "model");
  c.seed = json_get(j, "seed", c.seed, "model");
  c.model_width = json_get(j, "model_width", c.model_width, "model");
  c.ffn_multiplier = json_get(j, "ffn_multiplier", c.ffn_multiplier, "model");
}

}  // namespace cothink::model
