// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

// Self-checks behind `cothink verify` and the acceptance suite. Each check
// is parameterized by its workload so the CLI can run a quick pass and the
// acceptance binary the full one.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cothink/eval/floyd_warshall.hpp"
#include "cothink/model/transformer.hpp"
#include "cothink/sched/layout.hpp"

namespace cothink::verify {

struct Outcome {
  bool passed = true;
  long long cases = 0;
  std::string detail;  // first failure, empty on success

  void fail(std::string what) {
    if (passed) detail = std::move(what);
    passed = false;
  }
};

using MaskBuilder = std::function<sched::AttentionMask(const sched::GroupConfig&, int steps,
                                                       std::span<const int> lengths)>;

// Evaluates a physical sequence through a KV cache: context entries are
// appended, probes evaluated without appending. One logits row per entry.
model::Logits replay_sequence(const model::Model& model, const sched::PhysicalSequence& seq,
                              std::span<const model::TokenId> tokens);

// Dijkstra from every source; independent of the Floyd-Warshall loop.
eval::Matrix dijkstra_all_pairs(const eval::Matrix& weights);

Outcome check_slot_positions();
Outcome check_local_positions(int max_agents, int max_budget);

struct MaskGrid {
  int max_agents = 4;
  int max_budget = 16;
  std::vector<int> prompt_lens{0, 1, 8};
  std::vector<int> header_lens{0, 2};
  bool early_stops = true;  // also one random per-agent length vector per config
};
Outcome check_mask_oracle(const MaskBuilder& build, const MaskGrid& grid, std::uint64_t seed);
// Interleaved rows see earlier agents' same-step tokens and not later ones'.
Outcome check_interleaved_within_step(const MaskBuilder& build);

Outcome check_single_agent_reduction(const model::Model& model, int seeds, int budget);
Outcome check_incremental_full(std::uint64_t seed, int cases, int max_len);
Outcome check_conditioning_fidelity(const model::Model& model, std::uint64_t seed, int budget);
Outcome check_transcript_replay(const model::Model& model, std::uint64_t seed);

Outcome check_fw_against_dijkstra(std::uint64_t seed, int graphs, int max_nodes);
Outcome check_fw_benchmark_step();
Outcome check_analytic_curves(int max_k);
Outcome check_coverage_properties(std::uint64_t seed, int transcripts);
Outcome check_latency_model(std::uint64_t seed, int profiles);

struct CheckResult {
  std::string name;
  Outcome outcome;
  double seconds = 0.0;
};

struct SuiteOptions {
  std::string filter;  // substring of the check name; empty runs all
  MaskBuilder mask_builder;  // defaults to sched::build_mask
  model::ModelConfig model;
  std::uint64_t seed = 1;
};

std::vector<std::string> suite_check_names();
std::vector<CheckResult> run_suite(const SuiteOptions& options);

}  // namespace cothink::verify
