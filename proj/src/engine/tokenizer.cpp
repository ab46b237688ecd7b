// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/engine/tokenizer.hpp"

#include <cstdio>

namespace cothink::engine {

std::vector<TokenId> ByteTokenizer::encode(std::string_view text) {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (unsigned char c : text) out.push_back(static_cast<TokenId>(c));
  return out;
}

std::string ByteTokenizer::decode(std::span<const TokenId> tokens) {
  std::string out;
  for (TokenId t : tokens) {
    if (t >= 0 && t < 256) out.push_back(static_cast<char>(t));
  }
  return out;
}

std::string ByteTokenizer::piece(TokenId token) {
  if (token == kEndOfThought) return {};
  if (token < 0 || token > 255) return "<tok:" + std::to_string(token) + ">";
  if ((token >= 0x20 && token < 0x7F) || token == '\n' || token == '\t' || token == '\r') {
    return std::string(1, static_cast<char>(token));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "<0x%02X>", static_cast<unsigned>(token));
  return buf;
}

}  // namespace cothink::engine
