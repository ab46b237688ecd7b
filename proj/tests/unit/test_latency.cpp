// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cothink/errors.hpp"
#include "cothink/latency/roofline.hpp"

namespace cothink::latency {
namespace {

HardwareProfile example() { return {1e12, 1e14, 16e9, 32e9, 0.0}; }

sched::GroupConfig group(int n, int k, sched::Mode mode) {
  sched::GroupConfig c;
  c.n_agents = n;
  c.budget = k;
  c.mode = mode;
  c.prompt_len = 4;
  return c;
}

HardwareProfile random_profile(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> exp10(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * exp10(rng)); };
  return {draw(10, 13), draw(12, 15), draw(8, 11), draw(8, 11), 0.0};
}

TEST(Roofline, CrossoverOfTheExampleProfile) {
  EXPECT_DOUBLE_EQ(crossover_batch(example()), 50.0);
}

TEST(Roofline, CrossoverLimits) {
  HardwareProfile p = example();
  p.compute = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(std::isinf(crossover_batch(p)));
  EXPECT_EQ(step_latency(p, 1000), p.weight_bytes / p.mem_bandwidth);
  // Both terms equal at N = 1.
  const HardwareProfile sym{2.0, 3.0, 4.0, 6.0, 0.0};
  EXPECT_DOUBLE_EQ(crossover_batch(sym), 1.0);
}

TEST(Roofline, StepLatencyRegimes) {
  const HardwareProfile p = example();
  EXPECT_EQ(step_latency(p, 1), p.weight_bytes / p.mem_bandwidth);
  EXPECT_EQ(step_latency(p, 2), step_latency(p, 4));
  EXPECT_EQ(step_latency(p, 50), step_latency(p, 1));
  EXPECT_GT(step_latency(p, 51), step_latency(p, 50));
  EXPECT_DOUBLE_EQ(step_latency(p, 400), 2.0 * step_latency(p, 200));
}

TEST(Roofline, FlatBelowCrossoverStrictlyIncreasingAbove) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const HardwareProfile p = random_profile(rng);
    const double cross = crossover_batch(p);
    const double base = step_latency(p, 1);
    const int limit = static_cast<int>(std::min(cross, 2000.0));
    for (int n = 1; n <= limit; ++n) ASSERT_EQ(step_latency(p, n), base) << trial << " N=" << n;
    const int first = std::max(1, static_cast<int>(std::floor(cross)));
    for (int n = first; n < first + 50; ++n) {
      if (n + 1 > cross) ASSERT_LT(step_latency(p, n), step_latency(p, n + 1)) << trial << " N=" << n;
    }
  }
}

TEST(Roofline, TotalLatency) {
  const HardwareProfile p = example();
  EXPECT_EQ(total_latency(group(4, 16, sched::Mode::kGroupLockstep), p, 10),
            total_latency(group(1, 16, sched::Mode::kGroupLockstep), p, 10));
  EXPECT_DOUBLE_EQ(total_latency(group(2, 16, sched::Mode::kGroupInterleaved), p, 10),
                   2.0 * total_latency(group(2, 16, sched::Mode::kGroupLockstep), p, 10));
  EXPECT_EQ(total_latency(group(3, 16, sched::Mode::kGroupLockstep), p, 0), 0.0);
  const auto cfg = group(3, 16, sched::Mode::kIndependent);
  const double one = total_latency(cfg, p, 1);
  for (int k = 0; k <= 16; ++k) EXPECT_DOUBLE_EQ(total_latency(cfg, p, k), k * one);
  EXPECT_THROW(total_latency(cfg, p, 17), ValidationError);
}

TEST(Roofline, KvTrafficAddsToTheMemoryTerm) {
  HardwareProfile p = example();
  p.kv_bytes_per_token = 1e6;
  EXPECT_DOUBLE_EQ(step_latency(p, 2, 1000), (16e9 + 2e9) / 1e12);
  const auto cfg = group(2, 8, sched::Mode::kGroupLockstep);
  EXPECT_GT(total_latency(cfg, p, 8), total_latency(cfg, example(), 8));
  EXPECT_LT(total_latency(cfg, p, 4), total_latency(cfg, p, 8));
}

TEST(Roofline, Validation) {
  HardwareProfile p = example();
  p.mem_bandwidth = 0;
  EXPECT_THROW(crossover_batch(p), ValidationError);
  p = example();
  p.flops_per_token = -1;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_THROW(step_latency(example(), 0), ValidationError);
  const auto j = nlohmann::json::parse(R"({"mem_bandwidth": 1e12, "compute": 1e14, "weight_bytes": 16e9, "flops_per_token": 32e9})");
  EXPECT_DOUBLE_EQ(crossover_batch(profile_from_json(j, "hardware")), 50.0);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"mem_bandwidth": 1})"), "hardware"),
               ValidationError);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"bandwidth": 1})"), "hardware"),
               ValidationError);
}

}  // namespace
}  // namespace cothink::latency
