// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cothink/coordinate.hpp"
#include "cothink/sched/group_config.hpp"

namespace cothink::sched {

// Position indices are 1-based: the shared prompt occupies 1..prompt_len.

// Agent-batch layout: each agent's own step-k token sits after a reserved
// block of K(N-1) positions holding the other agents' tokens.
//   prompt_len + agent_prompt_len + K(N-1) + k
int assign_position_local(const GroupConfig& cfg, int agent, int k);

// Where, inside `viewer`'s sequence, agent `other`'s step-j token lands: the
// reserved block is filled in ascending (other agent, step) order, skipping
// the viewer.
int reserved_position_local(const GroupConfig& cfg, int viewer, int other, int j);

struct AgentSlot {
  int agent = 0;
  int first_position = 0;  // first agent-prompt index
  int length = 0;          // agent_prompt_len + K
  int header_len = 0;      // agent_prompt_len

  int first_output() const { return first_position + header_len; }
  friend bool operator==(const AgentSlot&, const AgentSlot&) = default;
};

// Slot layout: agent n's slot starts at
//   prompt_len + (n-1)(agent_prompt_len + K) + 1
std::vector<AgentSlot> assign_slots_interleaved(const GroupConfig& cfg);

// Position a token receives in the mode's own layout (the value recorded in
// transcripts). Prompt and agent-prompt positions are shared by both layouts.
int own_position(const GroupConfig& cfg, const TokenCoordinate& coord);

// The token fed to the model when generating `target`: the agent's previous
// thought, else its last agent-prompt token, else the last prompt token.
// Empty when there is nothing to condition on (no prompt and no header).
std::optional<TokenCoordinate> input_coordinate(const GroupConfig& cfg,
                                                const TokenCoordinate& target);

struct GenerationEvent {
  enum class Kind { kPrefillPrompt, kPrefillHeader, kGenerate };
  Kind kind = Kind::kGenerate;
  int agent = 0;                        // header owner for kPrefillHeader
  std::vector<TokenCoordinate> tokens;  // simultaneous set for kGenerate

  friend bool operator==(const GenerationEvent&, const GenerationEvent&) = default;
};

// Lockstep, independent and single-chain modes: prompt, every header, then
// one simultaneous set per step. Interleaved mode: prompt, then for each
// agent its header immediately followed by its first token, then steps
// 2..K one token at a time in agent order.
std::vector<GenerationEvent> generation_order(const GroupConfig& cfg);

// Tokens in generation order, truncated at `steps` thoughts per agent (or
// per-agent `lengths` when given, for chains that ended early).
std::vector<TokenCoordinate> timeline(const GroupConfig& cfg, int steps,
                                      std::span<const int> lengths = {});

// Whether `candidate` may condition the generation of thought `target`,
// assuming `candidate` exists by then. Pure rule, no layout simulation.
bool conditions_on(const GroupConfig& cfg, const TokenCoordinate& target,
                   const TokenCoordinate& candidate);

// The tokens the row of `coord` attends to, including itself, restricted to
// the timeline of `steps` thoughts per agent (K when negative). A thought's
// row is the conditioning set of the same agent's next thought; an agent's
// last header token conditions its first thought. Sorted ascending.
// Throws ValidationError when `coord` is outside the timeline.
std::vector<TokenCoordinate> visibility_oracle(const GroupConfig& cfg,
                                               const TokenCoordinate& coord, int steps = -1,
                                               std::span<const int> lengths = {});

}  // namespace cothink::sched
