// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <string>
#include <vector>

#include "cothink/engine/token_source.hpp"
#include "cothink/remote/openai_client.hpp"

namespace cothink::engine {

struct RemoteSourceConfig {
  // Tokens requested per call. Each agent's context is rebuilt from the
  // view at the start of every chunk; 1 gives token-level interleaving.
  int chunk = 16;
  // Instruction template with {QUESTION} and {ThinkerID} placeholders.
  std::string instruction_template;

  void validate() const;
};

// Token source over a text-completion endpoint. Tokens carry id -1 and the
// server's token text. A finished completion ("stop", or fewer tokens than
// asked) ends the agent's chain once its buffer drains.
//
// Context for agent n: the filled instruction template, then for each other
// agent with visible thoughts its header and chain text, then n's own
// header and chain text.
class RemoteSource : public TokenSource {
 public:
  static constexpr TokenId kRemoteToken = -1;

  RemoteSource(remote::CompletionClient& client, RemoteSourceConfig config);

  std::string name() const override { return "remote"; }
  void begin(const sched::GroupConfig& cfg, const SessionPrompt& prompt) override;
  std::vector<Emission> generate(std::span<const ThinkRequest> batch, Sampler& sampler) override;
  std::vector<Emission> answer(const AnswerRequest& request, Sampler& sampler) override;

  std::string context_for(const ThinkRequest& request) const;
  int requests_made() const { return requests_; }

 private:
  struct AgentState {
    std::deque<std::string> pending;
    bool finished = false;
  };

  remote::CompletionClient* client_;
  RemoteSourceConfig config_;
  SessionPrompt prompt_;
  std::vector<AgentState> agents_;
  int requests_ = 0;
};

// Replaces every {key} occurrence.
std::string fill_template(std::string text, const std::string& key, const std::string& value);

}  // namespace cothink::engine
