// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cothink/engine/sampler.hpp"
#include "cothink/engine/token_source.hpp"
#include "cothink/sched/group_config.hpp"

namespace cothink::engine {

struct ThinkEvent {
  TokenCoordinate coord;
  int position = 0;
  TokenId token = -1;
  std::string text;
  bool end_of_thought = false;

  friend bool operator==(const ThinkEvent&, const ThinkEvent&) = default;
};

struct Transcript {
  sched::GroupConfig config;
  SamplerConfig sampler;
  std::string source;
  std::uint64_t model_checksum = 0;
  std::optional<std::string> created;  // omitted by --no-timestamp
  SessionPrompt prompt;
  std::vector<ThinkEvent> events;  // generation order
  std::vector<TokenId> answer;
  std::string answer_text;

  // Thought tokens per agent, end-of-thought included.
  std::vector<int> lengths() const;
  // Longest chain: the per-thinker latency in tokens.
  int latency() const;
  // Concatenated text of `agent`'s first `max_step` thoughts (all when
  // negative), end-of-thought excluded.
  std::string chain_text(int agent, int max_step = -1) const;
  std::vector<AgentChain> chains(int max_step = -1) const;
};

// Think phase: walks generation_order, handing each request the view the
// mode's visibility rule allows. An agent that emits end-of-thought stops;
// the others continue.
Transcript run_think_phase(const sched::GroupConfig& cfg, TokenSource& source,
                           const SessionPrompt& prompt, Sampler& sampler);

// Answer phase: one sequential decode over the prompt, every non-empty
// chain under its header (agent order) and the answer header. Fills
// transcript.answer and answer_text.
void run_answer_phase(Transcript& transcript, TokenSource& source, Sampler& sampler,
                      int answer_budget);

// JSON Lines: a header record, one record per event, then an answer record.
void write_transcript(std::ostream& out, const Transcript& t);
std::string transcript_to_jsonl(const Transcript& t);
Transcript read_transcript(std::istream& in);

// Structural checks: events follow generation_order (skipping frozen agents)
// and every position equals the scheduler's assignment. Returns the first
// problem found, or nullopt.
std::optional<std::string> check_transcript(const Transcript& t);

// Re-runs the think phase from the transcript's own header over `source`.
Transcript replay_think_phase(const Transcript& t, TokenSource& source);

}  // namespace cothink::engine
