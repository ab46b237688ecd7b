// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>

#include "cothink/bit_matrix.hpp"
#include "cothink/coordinate.hpp"
#include "cothink/errors.hpp"

namespace cothink {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kPrompt:
      return "prompt";
    case Role::kAgentPrompt:
      return "agent_prompt";
    case Role::kThought:
      return "thought";
    case Role::kAnswer:
      return "answer";
  }
  return "unknown";
}

Role parse_role(std::string_view name) {
  if (name == "prompt") return Role::kPrompt;
  if (name == "agent_prompt") return Role::kAgentPrompt;
  if (name == "thought") return Role::kThought;
  if (name == "answer") return Role::kAnswer;
  throw ValidationError("unknown token role '" + std::string(name) + "'");
}

std::string to_string(const TokenCoordinate& c) {
  switch (c.role) {
    case Role::kPrompt:
      return "P[" + std::to_string(c.offset) + "]";
    case Role::kAgentPrompt:
      return "AP" + std::to_string(c.agent) + "[" + std::to_string(c.offset) + "]";
    case Role::kThought:
      return "(" + std::to_string(c.agent) + "," + std::to_string(c.step) + ")";
    case Role::kAnswer:
      return "A[" + std::to_string(c.offset) + "]";
  }
  return "?";
}

std::size_t BitMatrix::row_count(std::size_t row) const {
  std::size_t count = 0;
  for (std::size_t w = 0; w < words_; ++w) count += std::popcount(bits_[row * words_ + w]);
  return count;
}

std::string BitMatrix::row_hex(std::size_t row) const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve((n_ + 3) / 4);
  for (std::size_t col = 0; col < n_; col += 4) {
    unsigned nibble = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      nibble <<= 1;
      if (col + b < n_ && get(row, col + b)) nibble |= 1U;
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

void BitMatrix::set_row_hex(std::size_t row, const std::string& hex) {
  if (hex.size() != (n_ + 3) / 4) throw ValidationError("mask row hex has wrong length");
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char ch = hex[i];
    unsigned nibble = 0;
    if (ch >= '0' && ch <= '9') {
      nibble = static_cast<unsigned>(ch - '0');
    } else if (ch >= 'a' && ch <= 'f') {
      nibble = static_cast<unsigned>(ch - 'a' + 10);
    } else if (ch >= 'A' && ch <= 'F') {
      nibble = static_cast<unsigned>(ch - 'A' + 10);
    } else {
      throw ValidationError("mask row hex has invalid digit");
    }
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t col = i * 4 + b;
      const bool bit = (nibble >> (3 - b)) & 1U;
      if (col < n_) {
        set(row, col, bit);
      } else if (bit) {
        throw ValidationError("mask row hex sets a padding bit");
      }
    }
  }
}

}  // namespace cothink
