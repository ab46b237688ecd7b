// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cothink {

// Dense square boolean matrix, one packed bit row per query.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  std::size_t size() const { return n_; }

  bool get(std::size_t row, std::size_t col) const {
    return (bits_[row * words_ + col / 64] >> (col % 64)) & 1U;
  }
  void set(std::size_t row, std::size_t col, bool value = true) {
    std::uint64_t& w = bits_[row * words_ + col / 64];
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    w = value ? (w | bit) : (w & ~bit);
  }

  std::size_t row_count(std::size_t row) const;

  // Row as a big-endian hex string over columns 0..n-1, column 0 being the
  // most significant bit of the first nibble. Length is ceil(n / 4).
  std::string row_hex(std::size_t row) const;
  void set_row_hex(std::size_t row, const std::string& hex);

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace cothink
