// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cothink/coordinate.hpp"

namespace cothink::model {

struct CacheEntry {
  TokenCoordinate coord;
  int position = 0;
};

// Append-only store of per-layer (rotated) keys and values. Entry order is
// insertion order and is not required to follow position order.
class KVCache {
 public:
  KVCache() = default;
  KVCache(int num_layers, int width);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int num_layers() const { return num_layers_; }
  int width() const { return width_; }

  const std::vector<CacheEntry>& entries() const { return entries_; }
  std::optional<std::size_t> find(const TokenCoordinate& coord) const;
  bool contains(const TokenCoordinate& coord) const { return find(coord).has_value(); }

  std::span<const float> key(int layer, std::size_t index) const;
  std::span<const float> value(int layer, std::size_t index) const;

 private:
  friend class CacheWriter;

  int num_layers_ = 0;
  int width_ = 0;
  std::vector<CacheEntry> entries_;
  std::vector<std::vector<float>> keys_;    // per layer, [entries x width]
  std::vector<std::vector<float>> values_;  // per layer, [entries x width]
  std::unordered_map<TokenCoordinate, std::size_t, TokenCoordinateHash> index_;
};

}  // namespace cothink::model
