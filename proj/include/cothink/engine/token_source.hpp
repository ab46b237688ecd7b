// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cothink/coordinate.hpp"
#include "cothink/engine/sampler.hpp"
#include "cothink/sched/group_config.hpp"

namespace cothink::engine {

// Shared prompt, per-agent headers and the answer header, tokenized with
// the byte tokenizer. Every header has the same length.
struct SessionPrompt {
  std::vector<TokenId> prompt;
  std::string prompt_text;
  std::vector<std::vector<TokenId>> headers;
  std::vector<std::string> header_texts;
  std::vector<TokenId> answer_header;
  std::string answer_header_text;

  int prompt_len() const { return static_cast<int>(prompt.size()); }
  int header_len() const { return headers.empty() ? 0 : static_cast<int>(headers[0].size()); }
  friend bool operator==(const SessionPrompt&, const SessionPrompt&) = default;
};

// Expands `{n}` in the templates with the agent number, zero-padded to the
// width of n_agents so that every header has the same length.
SessionPrompt make_session_prompt(std::string_view prompt_text, std::string_view header_template,
                                  int n_agents, std::string_view answer_header);

struct ViewEntry {
  TokenCoordinate coord;
  TokenId token = -1;
  std::string text;
};

// One token to generate. `view` holds exactly the tokens the target may
// condition on, in generation order.
struct ThinkRequest {
  TokenCoordinate target;
  int position = 0;
  std::vector<ViewEntry> view;
};

struct Emission {
  TokenId token = -1;
  std::string text;
  bool end_of_thought = false;

  friend bool operator==(const Emission&, const Emission&) = default;
};

struct AgentChain {
  int agent = 0;
  std::vector<TokenId> tokens;  // end-of-thought excluded
  std::string text;
};

struct AnswerRequest {
  const SessionPrompt* prompt = nullptr;
  std::vector<AgentChain> chains;  // agent-ascending, empty chains omitted
  int budget = 0;
};

// Produces thought tokens. Sources only ever see the views the engine hands
// them.
class TokenSource {
 public:
  virtual ~TokenSource() = default;

  virtual std::string name() const = 0;
  // Checksum of the backing parameters, 0 when not applicable.
  virtual std::uint64_t checksum() const { return 0; }

  // Resets per-session state.
  virtual void begin(const sched::GroupConfig& cfg, const SessionPrompt& prompt) = 0;
  // One emission per request, in request order. Lockstep steps arrive as one
  // batch; interleaved steps one request at a time.
  virtual std::vector<Emission> generate(std::span<const ThinkRequest> batch,
                                         Sampler& sampler) = 0;
  // At most request.budget tokens; stops early at end-of-thought, which is
  // not included.
  virtual std::vector<Emission> answer(const AnswerRequest& request, Sampler& sampler) = 0;
};

}  // namespace cothink::engine
