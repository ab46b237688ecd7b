// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/engine/sampler.hpp"

#include <cmath>
#include <vector>

#include "cothink/errors.hpp"

namespace cothink::engine {

void SamplerConfig::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("sampler: temperature must be a finite value >= 0");
  }
}

TokenId sample(std::span<const float> logits, double temperature, std::mt19937_64& rng) {
  if (logits.empty()) throw ValidationError("sample: empty logits");
  std::size_t best = logits.size();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const float l = logits[i];
    if (std::isnan(l) || l == INFINITY) throw ValidationError("sample: non-finite logit");
    if (l == -INFINITY) continue;
    if (best == logits.size() || l > logits[best]) best = i;
  }
  if (best == logits.size()) throw ValidationError("sample: every logit is -inf");
  if (temperature == 0.0) return static_cast<TokenId>(best);

  const double top = logits[best];
  std::vector<double> weights(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    weights[i] = logits[i] == -INFINITY ? 0.0 : std::exp((logits[i] - top) / temperature);
    total += weights[i];
  }
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
  double acc = 0.0;
  std::size_t last = best;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return static_cast<TokenId>(i);
  }
  return static_cast<TokenId>(last);
}

Sampler::Sampler(const SamplerConfig& config) : config_(config) { config_.validate(); }

std::uint64_t Sampler::stream_seed(std::uint64_t seed, int id) {
  // splitmix64 finalizer over (seed, id).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(id) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64& Sampler::stream(int id) {
  auto it = streams_.find(id);
  if (it == streams_.end()) {
    const std::uint64_t s = config_.per_agent_streams ? stream_seed(config_.seed, id) : config_.seed;
    it = streams_.emplace(id, std::mt19937_64(s)).first;
  }
  return it->second;
}

TokenId Sampler::sample(std::span<const float> logits, int stream_id) {
  return engine::sample(logits, config_.temperature, stream(stream_id));
}

}  // namespace cothink::engine
