// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cothink/engine/decode.hpp"
#include "cothink/engine/scripted_source.hpp"
#include "cothink/eval/task.hpp"
#include "cothink/latency/roofline.hpp"
#include "cothink/sched/group_config.hpp"

namespace cothink::eval {

// How scripted agents draw from the solution pool.
enum class Policy {
  kPartition,     // agent n takes pool items n, n+N, n+2N, ...: never overlaps
  kAvoidVisible,  // first pool item not visible yet: overlaps only on hidden tokens
  kShuffled,      // independent seeded shuffle per agent: overlaps freely
};

Policy parse_policy(std::string_view name);
std::string_view policy_name(Policy p);

std::vector<engine::ScriptProgram> scripted_policy(Policy policy, const Task& task, int n_agents,
                                                   int budget, std::uint64_t seed);

// Coverage of the combined chains truncated at k thoughts per agent, for
// k = 0..budget.
std::vector<double> prefix_coverage(const Task& task, const engine::Transcript& t, int budget,
                                    Judge* judge = nullptr);

struct CurvePoint {
  int k = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation across runs
  std::optional<double> estimated_seconds;
};

struct CoverageCurve {
  std::string task_id;
  sched::Mode mode = sched::Mode::kSingleChain;
  int n_agents = 1;
  int runs = 0;
  std::vector<CurvePoint> points;
};

// Builds the source for one (cell, run). Called concurrently when jobs > 1.
using SourceFactory =
    std::function<std::unique_ptr<engine::TokenSource>(const sched::GroupConfig& cfg, int run)>;

struct SweepSpec {
  Task task;
  std::vector<sched::Mode> modes;
  std::vector<int> n_agents;
  int budget = 1;
  int runs = 1;
  engine::SamplerConfig sampler;  // run r uses seed + r
  std::string header_template = "Thinker {n}: ";
  std::string answer_header = "Answer: ";
  SourceFactory make_source;
  Judge* judge = nullptr;
  std::optional<latency::HardwareProfile> hardware;
  int jobs = 1;
};

// One curve per (mode, N) cell in grid order; single_cot cells with N != 1
// are skipped. Results do not depend on `jobs`.
std::vector<CoverageCurve> sweep(const SweepSpec& spec);

// CSV with columns task, mode, n_agents, step_k, coverage_mean,
// coverage_std, runs, estimated_seconds. A leading "# created" comment is
// written only when `created` is set.
std::string curves_to_csv(const std::vector<CoverageCurve>& curves,
                          const std::optional<std::string>& created = std::nullopt);

// Plain-text table of mean coverage at the given steps.
std::string summary_table(const std::vector<CoverageCurve>& curves, const std::vector<int>& steps);

}  // namespace cothink::eval
