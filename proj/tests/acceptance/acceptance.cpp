// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

// Runs every acceptance criterion at its stated workload and time limit and
// prints one PASS/FAIL line each. Exit status is nonzero when any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cothink/sched/layout.hpp"
#include "cothink/verify/invariants.hpp"

namespace {

namespace fs = std::filesystem;
using cothink::verify::Outcome;

constexpr std::uint64_t kSeed = 20260101;

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

Outcome merge(Outcome a, const Outcome& b) {
  a.cases += b.cases;
  if (!b.passed) a.fail(b.detail);
  return a;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome bench_determinism() {
  Outcome o;
  const fs::path tmp = fs::temp_directory_path() / "cothink_acceptance_bench";
  fs::remove_all(tmp);
  std::vector<std::string> csv;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + COTHINK_TOOL + "\" bench -c \"" + COTHINK_SOURCE_DIR +
                            "/configs/bench_toy.json\" --out \"" + (tmp / run).string() +
                            "\" --no-timestamp > /dev/null";
    ++o.cases;
    if (std::system(cmd.c_str()) != 0) {
      o.fail("bench exited nonzero: " + cmd);
      return o;
    }
    csv.push_back(slurp(tmp / run / "curves.csv"));
  }
  if (csv[0].empty()) o.fail("empty CSV");
  if (csv[0] != csv[1]) o.fail("CSV outputs differ");
  fs::remove_all(tmp);
  return o;
}

}  // namespace

int main() {
  using namespace cothink;
  const verify::MaskBuilder builder = [](const sched::GroupConfig& c, int steps, std::span<const int> len) {
    return sched::build_mask(c, steps, len);
  };
  const model::Model toy = model::Model::init(model::ModelConfig{});

  const std::vector<Criterion> criteria{
      {1, "position layout fidelity", 1.0, [] { return verify::check_slot_positions(); }},
      {2, "local layout fidelity", 1.0, [] { return verify::check_local_positions(8, 64); }},
      {3, "mask-oracle conformance", 30.0,
       [&] {
         verify::MaskGrid grid;  // N <= 4, K <= 16, prompt_len in {0, 1, 8}
         return merge(verify::check_mask_oracle(builder, grid, kSeed),
                      verify::check_interleaved_within_step(builder));
       }},
      {4, "N=1 reduction", 60.0, [&] { return verify::check_single_agent_reduction(toy, 20, 32); }},
      {5, "incremental/full equivalence", 120.0, [] { return verify::check_incremental_full(kSeed, 50, 64); }},
      {6, "Floyd-Warshall oracle", 10.0,
       [] {
         return merge(verify::check_fw_against_dijkstra(kSeed, 100, 6), verify::check_fw_benchmark_step());
       }},
      {7, "analytic coverage curves", 30.0, [] { return verify::check_analytic_curves(128); }},
      {8, "coverage properties", 60.0, [] { return verify::check_coverage_properties(kSeed, 1000); }},
      {9, "latency model", 1.0, [] { return verify::check_latency_model(kSeed, 100); }},
      {10, "bench determinism", 60.0, bench_determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.passed && secs > c.limit_seconds) o.fail("exceeded the time limit");
    if (!o.passed) ++failed;
    std::printf("%s  %2d %-30s %9lld cases  %8.3f s (limit %g s)%s%s\n", o.passed ? "PASS" : "FAIL", c.id,
                c.name, o.cases, secs, c.limit_seconds, o.passed ? "" : "  ", o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
