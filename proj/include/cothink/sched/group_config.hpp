// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace cothink::sched {

enum class Mode {
  kGroupLockstep,     // all agents emit step k together (agent-batch layout)
  kGroupInterleaved,  // agents emit step k in order 1..N (slot layout)
  kIndependent,       // concurrent chains without cross-agent visibility
  kSingleChain,       // one chain of thought, N = 1
};

// Canonical names: group_think_lockstep, group_think_interleaved,
// independent_sampling, single_cot. Short names: gt-lockstep,
// gt-interleaved, is, cot.
std::string_view mode_name(Mode mode);
std::string_view mode_short_name(Mode mode);
Mode parse_mode(std::string_view name);

bool is_group_mode(Mode mode);
// Lockstep, independent and single-chain modes use the agent-batch layout
// (one sequence per agent, reserved block for the others); interleaved mode
// uses a single sequence with one slot of positions per agent.
bool uses_agent_batch_layout(Mode mode);

struct GroupConfig {
  int n_agents = 1;
  int budget = 1;  // K, tokens per thinker
  Mode mode = Mode::kSingleChain;
  int prompt_len = 0;
  int agent_prompt_len = 0;

  // Largest position index any token can receive:
  // prompt_len + n_agents * (agent_prompt_len + budget) in both layouts.
  long long max_position() const;

  // Throws ValidationError. `max_context` bounds max_position().
  void validate(long long max_context = 1LL << 24) const;

  friend bool operator==(const GroupConfig&, const GroupConfig&) = default;
};

}  // namespace cothink::sched
