// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>

#include "cothink/model/transformer.hpp"

namespace cothink::engine {

using model::TokenId;

struct SamplerConfig {
  double temperature = 0.0;  // 0 selects argmax
  std::uint64_t seed = 0;
  // When false every agent draws from a stream seeded with `seed` itself, so
  // agents with identical conditioning make identical draws.
  bool per_agent_streams = true;

  void validate() const;
  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

// temperature 0: smallest index among the maximal logits. Otherwise a draw
// from softmax(logits / temperature) using one 53-bit uniform from `rng`.
// Throws ValidationError on NaN or +inf logits, or when every logit is -inf.
TokenId sample(std::span<const float> logits, double temperature, std::mt19937_64& rng);

// Independent random streams keyed by agent (0 for the answer phase).
class Sampler {
 public:
  explicit Sampler(const SamplerConfig& config);

  const SamplerConfig& config() const { return config_; }
  TokenId sample(std::span<const float> logits, int stream);
  std::mt19937_64& stream(int id);

  static std::uint64_t stream_seed(std::uint64_t seed, int id);

 private:
  SamplerConfig config_;
  std::map<int, std::mt19937_64> streams_;
};

}  // namespace cothink::engine
