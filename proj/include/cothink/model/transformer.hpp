// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cothink/bit_matrix.hpp"
#include "cothink/coordinate.hpp"
#include "cothink/model/kv_cache.hpp"

namespace cothink::model {

using TokenId = std::int32_t;

struct ModelConfig {
  int num_layers = 2;
  int num_heads = 2;
  int head_dim = 16;
  int vocab_size = 257;
  double rotary_base = 10000.0;
  std::uint64_t seed = 7;
  // 0 derives the width from num_heads * head_dim; a nonzero value must
  // agree with it.
  int model_width = 0;
  int ffn_multiplier = 4;

  int width() const { return model_width != 0 ? model_width : num_heads * head_dim; }
  void validate() const;
};

// Row-major [rows x vocab] logits, one row per queried token.
struct Logits {
  std::size_t rows = 0;
  std::size_t vocab = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t r) const {
    return {values.data() + r * vocab, vocab};
  }
  std::span<float> row(std::size_t r) { return {values.data() + r * vocab, vocab}; }
};

struct LayerWeights {
  std::vector<float> attn_norm;  // [d]
  std::vector<float> wq;         // [d x d]
  std::vector<float> wk;         // [d x d]
  std::vector<float> wv;         // [d x d]
  std::vector<float> wo;         // [d x d]
  std::vector<float> mlp_norm;   // [d]
  std::vector<float> w_up;       // [f x d]
  std::vector<float> w_down;     // [d x f]
};

struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  const std::vector<float>* data;
};

// Decoder-only transformer with rotary position encoding applied at an
// explicit per-token position index. Immutable after construction; share
// freely across threads.
class Model {
 public:
  // Parameters drawn from a generator seeded with config.seed.
  static Model init(const ModelConfig& config);
  static Model from_tensors(const ModelConfig& config, std::vector<float> embedding,
                            std::vector<LayerWeights> layers, std::vector<float> final_norm);

  const ModelConfig& config() const { return config_; }
  int width() const { return config_.width(); }
  int ffn_width() const { return config_.width() * config_.ffn_multiplier; }

  const std::vector<float>& embedding() const { return embedding_; }
  const std::vector<LayerWeights>& layers() const { return layers_; }
  const std::vector<float>& final_norm() const { return final_norm_; }

  // Tensors in declaration order, as written to checkpoints.
  std::vector<NamedTensor> tensors() const;

  // FNV-1a over the little-endian bytes of every parameter, in declaration
  // order.
  std::uint64_t checksum() const;

 private:
  ModelConfig config_;
  std::vector<float> embedding_;  // [vocab x d], tied with the output head
  std::vector<LayerWeights> layers_;
  std::vector<float> final_norm_;
};

// Runs every token through the stack at once. Row i attends exactly to the
// columns set in mask row i; attention visits them in ascending (position,
// column) order. Throws ValidationError on size mismatch or when a row does
// not permit its own token.
Logits forward_full(const Model& model, std::span<const TokenId> tokens,
                    std::span<const int> positions, const BitMatrix& mask);

struct NewToken {
  TokenId token = 0;
  int position = 0;
  TokenCoordinate coord;
};

// Appends `tokens` to `cache` one at a time. Token i attends to itself plus
// the entries named by visible[i], which may reference entries already in
// the cache or earlier tokens of this call. Entries already in the cache
// are never modified. All visibility references are validated before the
// cache is touched; an unknown coordinate throws ValidationError.
Logits forward_incremental(const Model& model, KVCache& cache,
                           std::span<const NewToken> tokens,
                           std::span<const std::vector<TokenCoordinate>> visible);

// Evaluates one token against the cache without appending it. A cache entry
// sharing the probe's coordinate is ignored; the probe attends to its own
// freshly computed key/value instead.
Logits forward_probe(const Model& model, const KVCache& cache, const NewToken& token,
                     std::span<const TokenCoordinate> visible);

}  // namespace cothink::model
