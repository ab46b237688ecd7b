// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <unordered_map>

#include "cothink/engine/token_source.hpp"
#include "cothink/model/kv_cache.hpp"
#include "cothink/model/transformer.hpp"
#include "cothink/sched/group_config.hpp"

namespace cothink::engine {

// Token source backed by the toy transformer. Agent-batch modes keep one KV
// cache per agent, copying other agents' tokens into the reserved block;
// interleaved mode keeps one shared cache and evaluates each agent's input
// token as an uncached probe. Rows follow sched::row_includes, so the caches
// replay build_physical_layout entry for entry.
class ModelSource : public TokenSource {
 public:
  explicit ModelSource(const model::Model& model);

  std::string name() const override { return "toy"; }
  std::uint64_t checksum() const override;

  void begin(const sched::GroupConfig& cfg, const SessionPrompt& prompt) override;
  std::vector<Emission> generate(std::span<const ThinkRequest> batch, Sampler& sampler) override;
  std::vector<Emission> answer(const AnswerRequest& request, Sampler& sampler) override;

  // Receives the logits each thought was sampled from.
  using LogitsObserver =
      std::function<void(const TokenCoordinate& target, std::span<const float> logits)>;
  void set_observer(LogitsObserver observer) { observer_ = std::move(observer); }

  // One cache per agent in agent-batch modes, one shared cache otherwise.
  const std::vector<model::KVCache>& caches() const { return caches_; }

 private:
  model::Logits insert(std::size_t seq, int owner, const TokenCoordinate& coord);
  std::span<const float> generate_local(const ThinkRequest& req);
  std::span<const float> generate_slot(const ThinkRequest& req);

  const model::Model* model_;
  sched::GroupConfig cfg_;
  std::vector<model::KVCache> caches_;
  std::unordered_map<TokenCoordinate, TokenId, TokenCoordinateHash> tokens_;
  LogitsObserver observer_;
  model::Logits scratch_;
};

// The concatenated answer-phase context: prompt, then each non-empty chain
// preceded by its agent's header, then the answer header.
std::vector<TokenId> answer_context(const AnswerRequest& request);

}  // namespace cothink::engine
