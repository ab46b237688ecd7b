// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/sched/schedule.hpp"

#include <algorithm>

#include "cothink/errors.hpp"

namespace cothink::sched {

// ---------------------------------------------------------------------------
// GroupConfig

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kGroupLockstep:
      return "group_think_lockstep";
    case Mode::kGroupInterleaved:
      return "group_think_interleaved";
    case Mode::kIndependent:
      return "independent_sampling";
    case Mode::kSingleChain:
      return "single_cot";
  }
  return "unknown";
}

std::string_view mode_short_name(Mode mode) {
  switch (mode) {
    case Mode::kGroupLockstep:
      return "gt-lockstep";
    case Mode::kGroupInterleaved:
      return "gt-interleaved";
    case Mode::kIndependent:
      return "is";
    case Mode::kSingleChain:
      return "cot";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::kGroupLockstep, Mode::kGroupInterleaved, Mode::kIndependent,
                 Mode::kSingleChain}) {
    if (name == mode_name(m) || name == mode_short_name(m)) return m;
  }
  throw ValidationError("unknown mode '" + std::string(name) +
                        "' (expected cot, is, gt-lockstep or gt-interleaved)");
}

bool is_group_mode(Mode mode) {
  return mode == Mode::kGroupLockstep || mode == Mode::kGroupInterleaved;
}

bool uses_agent_batch_layout(Mode mode) { return mode != Mode::kGroupInterleaved; }

long long GroupConfig::max_position() const {
  return static_cast<long long>(prompt_len) +
         static_cast<long long>(n_agents) * (static_cast<long long>(agent_prompt_len) + budget);
}

void GroupConfig::validate(long long max_context) const {
  if (n_agents < 1) throw ValidationError("group config: n_agents must be >= 1");
  if (budget < 1) throw ValidationError("group config: budget must be >= 1");
  if (prompt_len < 0 || agent_prompt_len < 0) {
    throw ValidationError("group config: prompt lengths must be >= 0");
  }
  if (mode == Mode::kSingleChain && n_agents != 1) {
    throw ValidationError("group config: single_cot requires n_agents = 1");
  }
  if (max_position() > max_context) {
    throw ValidationError("group config: layout needs " + std::to_string(max_position()) +
                          " positions, context allows " + std::to_string(max_context));
  }
}

// ---------------------------------------------------------------------------
// Positions

int assign_position_local(const GroupConfig& cfg, int agent, int k) {
  if (agent < 1 || agent > cfg.n_agents) {
    throw ValidationError("assign_position_local: agent " + std::to_string(agent) +
                          " out of range");
  }
  if (k < 1 || k > cfg.budget) {
    throw ValidationError("assign_position_local: step " + std::to_string(k) +
                          " out of range");
  }
  return cfg.prompt_len + cfg.agent_prompt_len + cfg.budget * (cfg.n_agents - 1) + k;
}

int reserved_position_local(const GroupConfig& cfg, int viewer, int other, int j) {
  if (viewer < 1 || viewer > cfg.n_agents || other < 1 || other > cfg.n_agents ||
      other == viewer) {
    throw ValidationError("reserved_position_local: invalid agent pair");
  }
  if (j < 1 || j > cfg.budget) throw ValidationError("reserved_position_local: step out of range");
  const int rank = other - 1 - (other > viewer ? 1 : 0);
  return cfg.prompt_len + cfg.agent_prompt_len + rank * cfg.budget + j;
}

std::vector<AgentSlot> assign_slots_interleaved(const GroupConfig& cfg) {
  cfg.validate();
  std::vector<AgentSlot> slots;
  const int stride = cfg.agent_prompt_len + cfg.budget;
  for (int n = 1; n <= cfg.n_agents; ++n) {
    slots.push_back({n, cfg.prompt_len + (n - 1) * stride + 1, stride, cfg.agent_prompt_len});
  }
  return slots;
}

int own_position(const GroupConfig& cfg, const TokenCoordinate& c) {
  switch (c.role) {
    case Role::kPrompt:
      return c.offset + 1;
    case Role::kAgentPrompt:
      if (uses_agent_batch_layout(cfg.mode)) return cfg.prompt_len + 1 + c.offset;
      return cfg.prompt_len + (c.agent - 1) * (cfg.agent_prompt_len + cfg.budget) + 1 +
             c.offset;
    case Role::kThought:
      if (uses_agent_batch_layout(cfg.mode)) return assign_position_local(cfg, c.agent, c.step);
      return cfg.prompt_len + (c.agent - 1) * (cfg.agent_prompt_len + cfg.budget) +
             cfg.agent_prompt_len + c.step;
    case Role::kAnswer:
      break;
  }
  throw ValidationError("own_position: answer tokens are not part of the think layout");
}

std::optional<TokenCoordinate> input_coordinate(const GroupConfig& cfg,
                                                const TokenCoordinate& target) {
  if (target.step >= 2) return TokenCoordinate::thought(target.agent, target.step - 1);
  if (cfg.agent_prompt_len > 0) {
    return TokenCoordinate::header(target.agent, cfg.agent_prompt_len - 1);
  }
  if (cfg.prompt_len > 0) return TokenCoordinate::prompt(cfg.prompt_len - 1);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Order and visibility

std::vector<GenerationEvent> generation_order(const GroupConfig& cfg) {
  cfg.validate();
  using Kind = GenerationEvent::Kind;
  std::vector<GenerationEvent> events;
  events.push_back({Kind::kPrefillPrompt, 0, {}});
  if (cfg.mode == Mode::kGroupInterleaved) {
    for (int n = 1; n <= cfg.n_agents; ++n) {
      events.push_back({Kind::kPrefillHeader, n, {}});
      events.push_back({Kind::kGenerate, n, {TokenCoordinate::thought(n, 1)}});
    }
    for (int k = 2; k <= cfg.budget; ++k) {
      for (int n = 1; n <= cfg.n_agents; ++n) {
        events.push_back({Kind::kGenerate, n, {TokenCoordinate::thought(n, k)}});
      }
    }
    return events;
  }
  for (int n = 1; n <= cfg.n_agents; ++n) events.push_back({Kind::kPrefillHeader, n, {}});
  for (int k = 1; k <= cfg.budget; ++k) {
    GenerationEvent step{Kind::kGenerate, 0, {}};
    for (int n = 1; n <= cfg.n_agents; ++n) step.tokens.push_back(TokenCoordinate::thought(n, k));
    events.push_back(std::move(step));
  }
  return events;
}

namespace {

std::vector<int> agent_lengths(const GroupConfig& cfg, int steps, std::span<const int> lengths) {
  if (steps < 0) steps = cfg.budget;
  if (steps > cfg.budget) throw ValidationError("timeline: steps exceed the budget");
  std::vector<int> out(cfg.n_agents, steps);
  if (!lengths.empty()) {
    if (lengths.size() != static_cast<std::size_t>(cfg.n_agents)) {
      throw ValidationError("timeline: one length per agent required");
    }
    for (int n = 0; n < cfg.n_agents; ++n) out[n] = std::clamp(lengths[n], 0, steps);
  }
  return out;
}

}  // namespace

std::vector<TokenCoordinate> timeline(const GroupConfig& cfg, int steps,
                                      std::span<const int> lengths) {
  cfg.validate();
  const std::vector<int> len = agent_lengths(cfg, steps, lengths);
  const int max_len = len.empty() ? 0 : *std::max_element(len.begin(), len.end());
  std::vector<TokenCoordinate> out;
  for (int i = 0; i < cfg.prompt_len; ++i) out.push_back(TokenCoordinate::prompt(i));
  auto header = [&](int n) {
    for (int i = 0; i < cfg.agent_prompt_len; ++i) out.push_back(TokenCoordinate::header(n, i));
  };
  int first_step = 1;
  if (cfg.mode == Mode::kGroupInterleaved) {
    for (int n = 1; n <= cfg.n_agents; ++n) {
      header(n);
      if (len[n - 1] >= 1) out.push_back(TokenCoordinate::thought(n, 1));
    }
    first_step = 2;
  } else {
    for (int n = 1; n <= cfg.n_agents; ++n) header(n);
  }
  for (int k = first_step; k <= max_len; ++k) {
    for (int n = 1; n <= cfg.n_agents; ++n) {
      if (k <= len[n - 1]) out.push_back(TokenCoordinate::thought(n, k));
    }
  }
  return out;
}

bool conditions_on(const GroupConfig& cfg, const TokenCoordinate& target,
                   const TokenCoordinate& c) {
  const int n = target.agent;
  const int t = target.step;
  switch (c.role) {
    case Role::kPrompt:
      return true;
    case Role::kAgentPrompt:
      if (c.agent == n) return true;
      if (cfg.mode == Mode::kGroupLockstep) return true;
      if (cfg.mode == Mode::kGroupInterleaved) return c.agent < n || t >= 2;
      return false;
    case Role::kThought:
      if (c.agent == n) return c.step < t;
      if (cfg.mode == Mode::kGroupLockstep) return c.step <= t - 1;
      if (cfg.mode == Mode::kGroupInterleaved) {
        return c.step <= t - 1 || (c.agent < n && c.step == t);
      }
      return false;
    case Role::kAnswer:
      return false;
  }
  return false;
}

std::vector<TokenCoordinate> visibility_oracle(const GroupConfig& cfg,
                                               const TokenCoordinate& coord, int steps,
                                               std::span<const int> lengths) {
  const std::vector<TokenCoordinate> tl = timeline(cfg, steps, lengths);
  if (std::find(tl.begin(), tl.end(), coord) == tl.end()) {
    throw ValidationError("visibility_oracle: " + to_string(coord) + " is not in the timeline");
  }
  std::vector<TokenCoordinate> out;
  const bool last_header =
      coord.role == Role::kAgentPrompt && coord.offset == cfg.agent_prompt_len - 1;
  if (coord.role == Role::kPrompt) {
    for (int i = 0; i <= coord.offset; ++i) out.push_back(TokenCoordinate::prompt(i));
  } else if (coord.role == Role::kAgentPrompt && !last_header) {
    for (int i = 0; i < cfg.prompt_len; ++i) out.push_back(TokenCoordinate::prompt(i));
    for (int i = 0; i <= coord.offset; ++i) out.push_back(TokenCoordinate::header(coord.agent, i));
  } else {
    const TokenCoordinate next = TokenCoordinate::thought(coord.agent, coord.step + 1);
    for (const TokenCoordinate& c : tl) {
      if (c == coord || conditions_on(cfg, next, c)) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cothink::sched
