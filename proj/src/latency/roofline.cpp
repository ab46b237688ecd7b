// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/latency/roofline.hpp"

#include <algorithm>
#include <cmath>

#include "cothink/config_json.hpp"
#include "cothink/errors.hpp"

namespace cothink::latency {

void HardwareProfile::validate() const {
  auto positive = [](double v, const char* name, bool allow_inf) {
    if (!(v > 0.0) || (!allow_inf && std::isinf(v))) {
      throw ValidationError(std::string("hardware.") + name + " must be a positive number");
    }
  };
  positive(mem_bandwidth, "mem_bandwidth", false);
  positive(compute, "compute", true);
  positive(weight_bytes, "weight_bytes", false);
  positive(flops_per_token, "flops_per_token", false);
  if (!(kv_bytes_per_token >= 0.0) || std::isinf(kv_bytes_per_token)) {
    throw ValidationError("hardware.kv_bytes_per_token must be >= 0");
  }
}

HardwareProfile profile_from_json(const nlohmann::json& j, const std::string& where) {
  require_known_keys(j, {"mem_bandwidth", "compute", "weight_bytes", "flops_per_token",
                         "kv_bytes_per_token"},
                     where);
  HardwareProfile p;
  p.mem_bandwidth = json_get<double>(j, "mem_bandwidth", 0.0, where);
  p.compute = json_get<double>(j, "compute", 0.0, where);
  p.weight_bytes = json_get<double>(j, "weight_bytes", 0.0, where);
  p.flops_per_token = json_get<double>(j, "flops_per_token", 0.0, where);
  p.kv_bytes_per_token = json_get<double>(j, "kv_bytes_per_token", 0.0, where);
  p.validate();
  return p;
}

nlohmann::json profile_to_json(const HardwareProfile& p) {
  return {{"mem_bandwidth", p.mem_bandwidth},
          {"compute", p.compute},
          {"weight_bytes", p.weight_bytes},
          {"flops_per_token", p.flops_per_token},
          {"kv_bytes_per_token", p.kv_bytes_per_token}};
}

double crossover_batch(const HardwareProfile& p) {
  p.validate();
  return p.weight_bytes * p.compute / (p.mem_bandwidth * p.flops_per_token);
}

double step_latency(const HardwareProfile& p, int batch, double context_tokens) {
  if (batch < 1) throw ValidationError("step_latency: batch must be >= 1");
  if (!(context_tokens >= 0.0)) throw ValidationError("step_latency: context must be >= 0");
  const double kv = p.kv_bytes_per_token * batch * context_tokens;
  const double memory = (p.weight_bytes + kv) / p.mem_bandwidth;
  // Decided against the crossover rather than by comparing the two rounded
  // terms, so the flat region is exact.
  const double arithmetic = batch * p.flops_per_token / p.compute;
  if (kv == 0.0) return batch <= crossover_batch(p) ? memory : arithmetic;
  return std::max(memory, arithmetic);
}

double total_latency(const sched::GroupConfig& cfg, const HardwareProfile& p, int k) {
  if (k < 0 || k > cfg.budget) {
    throw ValidationError("total_latency: k must lie in 0.." + std::to_string(cfg.budget));
  }
  const int n = cfg.n_agents;
  const bool interleaved = !sched::uses_agent_batch_layout(cfg.mode);
  if (p.kv_bytes_per_token == 0.0) {
    return interleaved ? k * n * step_latency(p, 1) : k * step_latency(p, n);
  }
  // Context grows as the chains do; each sequence sees the prompt, headers
  // and every token it can attend to so far.
  double total = 0.0;
  const int group = sched::is_group_mode(cfg.mode) ? n : 1;
  if (interleaved) {
    for (int pass = 0; pass < k * n; ++pass) {
      total += step_latency(p, 1, cfg.prompt_len + double(n) * cfg.agent_prompt_len + pass);
    }
  } else {
    for (int s = 1; s <= k; ++s) {
      const double ctx = cfg.prompt_len + double(group) * (cfg.agent_prompt_len + s - 1);
      total += step_latency(p, n, ctx);
    }
  }
  return total;
}

}  // namespace cothink::latency
