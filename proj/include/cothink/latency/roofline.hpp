// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

// Roofline estimate of decode latency: a forward pass costs the larger of
// streaming the weights (plus KV reads) and doing the arithmetic.

#pragma once

#include <nlohmann/json.hpp>

#include "cothink/sched/group_config.hpp"

namespace cothink::latency {

struct HardwareProfile {
  double mem_bandwidth = 0.0;    // bytes / s
  double compute = 0.0;          // FLOP / s
  double weight_bytes = 0.0;     // bytes read per forward pass
  double flops_per_token = 0.0;  // FLOP per token per forward pass
  // Bytes of KV cache read per context token per sequence. 0 leaves the
  // memory term at the weights alone.
  double kv_bytes_per_token = 0.0;

  // Strictly positive fields (compute may be +inf), kv_bytes_per_token >= 0.
  void validate() const;
};

HardwareProfile profile_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json profile_to_json(const HardwareProfile& p);

// The batch at which the compute term catches up with the weight term:
//   weight_bytes * compute / (mem_bandwidth * flops_per_token)
double crossover_batch(const HardwareProfile& p);

// Seconds for one forward pass over `batch` sequences that each attend to
// `context_tokens` cached entries. Batches at or below the crossover return
// the memory term exactly.
double step_latency(const HardwareProfile& p, int batch, double context_tokens = 0.0);

// Seconds to emit k thoughts per agent. Agent-batch modes run one batched
// pass of N sequences per step; interleaved mode runs N single-sequence
// passes per step.
double total_latency(const sched::GroupConfig& cfg, const HardwareProfile& p, int k);

}  // namespace cothink::latency
