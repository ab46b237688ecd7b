// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cothink/model/transformer.hpp"

namespace cothink::engine {

using model::TokenId;

// One token per byte, plus an end-of-thought token.
class ByteTokenizer {
 public:
  static constexpr TokenId kEndOfThought = 256;
  static constexpr int kVocabSize = 257;

  static std::vector<TokenId> encode(std::string_view text);
  // Raw bytes; end-of-thought and out-of-range ids are dropped.
  static std::string decode(std::span<const TokenId> tokens);
  // Transcript-safe rendering: printable ASCII, tab, CR and LF as themselves,
  // other bytes as <0xNN>, end-of-thought as the empty string.
  static std::string piece(TokenId token);
};

}  // namespace cothink::engine
