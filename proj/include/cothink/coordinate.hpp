// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace cothink {

enum class Role : std::uint8_t { kPrompt, kAgentPrompt, kThought, kAnswer };

std::string_view role_name(Role role);
Role parse_role(std::string_view name);

// Identifies a token independently of where it sits in a KV cache or which
// position index it was given.
//
//   prompt        agent = 0, step = 0, offset = index within the prompt
//   agent_prompt  agent = n, step = 0, offset = index within agent n's header
//   thought       agent = n, step = k >= 1, offset = 0
//   answer        agent = 0, step = 0, offset = index within the answer
struct TokenCoordinate {
  int agent = 0;
  int step = 0;
  Role role = Role::kPrompt;
  int offset = 0;

  static TokenCoordinate prompt(int offset) { return {0, 0, Role::kPrompt, offset}; }
  static TokenCoordinate header(int agent, int offset) {
    return {agent, 0, Role::kAgentPrompt, offset};
  }
  static TokenCoordinate thought(int agent, int step) {
    return {agent, step, Role::kThought, 0};
  }

  friend auto operator<=>(const TokenCoordinate&, const TokenCoordinate&) = default;
  friend bool operator==(const TokenCoordinate&, const TokenCoordinate&) = default;
};

std::string to_string(const TokenCoordinate& c);

struct TokenCoordinateHash {
  std::size_t operator()(const TokenCoordinate& c) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.agent));
    h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(c.step);
    h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(c.role);
    h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(c.offset);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

}  // namespace cothink
