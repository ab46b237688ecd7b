// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/eval/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "cothink/errors.hpp"
#include "cothink/sched/schedule.hpp"

namespace cothink::eval {

Policy parse_policy(std::string_view name) {
  if (name == "partition") return Policy::kPartition;
  if (name == "avoid_visible") return Policy::kAvoidVisible;
  if (name == "shuffled") return Policy::kShuffled;
  throw ValidationError("unknown scripted policy '" + std::string(name) +
                        "' (partition, avoid_visible, shuffled)");
}

std::string_view policy_name(Policy p) {
  switch (p) {
    case Policy::kPartition:
      return "partition";
    case Policy::kAvoidVisible:
      return "avoid_visible";
    case Policy::kShuffled:
      return "shuffled";
  }
  return "unknown";
}

std::vector<engine::ScriptProgram> scripted_policy(Policy policy, const Task& task, int n_agents,
                                                   int budget, std::uint64_t seed) {
  const std::vector<std::string> pool = solution_pool(task, n_agents * budget);
  std::vector<engine::ScriptProgram> out;
  for (int n = 1; n <= n_agents; ++n) {
    switch (policy) {
      case Policy::kPartition: {
        std::vector<std::string> mine;
        for (std::size_t i = n - 1; i < pool.size(); i += n_agents) mine.push_back(pool[i]);
        out.push_back(engine::fixed_program(std::move(mine)));
        break;
      }
      case Policy::kAvoidVisible:
        out.push_back(engine::avoid_visible_program(pool));
        break;
      case Policy::kShuffled: {
        std::vector<std::string> mine = pool;
        std::mt19937_64 rng(engine::Sampler::stream_seed(seed, n));
        std::shuffle(mine.begin(), mine.end(), rng);
        out.push_back(engine::fixed_program(std::move(mine)));
        break;
      }
    }
  }
  return out;
}

std::vector<double> prefix_coverage(const Task& task, const engine::Transcript& t, int budget,
                                    Judge* judge) {
  std::vector<double> out;
  for (int k = 0; k <= budget; ++k) {
    std::vector<std::string> texts;
    for (int n = 1; n <= t.config.n_agents; ++n) texts.push_back(t.chain_text(n, k));
    out.push_back(score(task, texts, judge));
  }
  return out;
}

namespace {

struct Cell {
  sched::Mode mode;
  int n;
};

CoverageCurve run_cell(const SweepSpec& spec, const Cell& cell) {
  const engine::SessionPrompt prompt = engine::make_session_prompt(
      spec.task.prompt, spec.header_template, cell.n, spec.answer_header);
  sched::GroupConfig cfg;
  cfg.n_agents = cell.n;
  cfg.budget = spec.budget;
  cfg.mode = cell.mode;
  cfg.prompt_len = prompt.prompt_len();
  cfg.agent_prompt_len = prompt.header_len();
  cfg.validate();

  std::vector<std::vector<double>> per_run;
  for (int r = 0; r < spec.runs; ++r) {
    engine::SamplerConfig s = spec.sampler;
    s.seed += static_cast<std::uint64_t>(r);
    engine::Sampler sampler(s);
    std::unique_ptr<engine::TokenSource> source = spec.make_source(cfg, r);
    const engine::Transcript t = engine::run_think_phase(cfg, *source, prompt, sampler);
    per_run.push_back(prefix_coverage(spec.task, t, spec.budget, spec.judge));
  }

  CoverageCurve curve{spec.task.id, cell.mode, cell.n, spec.runs, {}};
  for (int k = 0; k <= spec.budget; ++k) {
    double sum = 0.0;
    for (const auto& run : per_run) sum += run[k];
    const double mean = sum / spec.runs;
    double var = 0.0;
    for (const auto& run : per_run) var += (run[k] - mean) * (run[k] - mean);
    CurvePoint p{k, mean, std::sqrt(var / spec.runs), std::nullopt};
    if (spec.hardware) p.estimated_seconds = latency::total_latency(cfg, *spec.hardware, k);
    curve.points.push_back(p);
  }
  return curve;
}

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::vector<CoverageCurve> sweep(const SweepSpec& spec) {
  if (spec.modes.empty() || spec.n_agents.empty()) {
    throw ValidationError("bench: the grid is empty (need at least one mode and one N)");
  }
  if (spec.runs < 1) throw ValidationError("bench: runs must be >= 1");
  if (spec.budget < 1) throw ValidationError("bench: budget must be >= 1");
  if (spec.jobs < 1) throw ValidationError("bench: jobs must be >= 1");
  if (!spec.make_source) throw ValidationError("bench: no token source");

  std::vector<Cell> cells;
  for (sched::Mode mode : spec.modes) {
    for (int n : spec.n_agents) {
      if (n < 1) throw ValidationError("bench: N must be >= 1");
      if (mode == sched::Mode::kSingleChain && n != 1) continue;
      cells.push_back({mode, n});
    }
  }
  if (cells.empty()) throw ValidationError("bench: no valid (mode, N) cell in the grid");

  std::vector<CoverageCurve> curves(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        curves[i] = run_cell(spec, cells[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(spec.jobs, static_cast<int>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return curves;
}

std::string curves_to_csv(const std::vector<CoverageCurve>& curves,
                          const std::optional<std::string>& created) {
  std::ostringstream out;
  if (created) out << "# created " << *created << '\n';
  out << "task,mode,n_agents,step_k,coverage_mean,coverage_std,runs,estimated_seconds\n";
  for (const CoverageCurve& c : curves) {
    for (const CurvePoint& p : c.points) {
      out << c.task_id << ',' << sched::mode_name(c.mode) << ',' << c.n_agents << ',' << p.k << ','
          << fmt(p.mean) << ',' << fmt(p.std) << ',' << c.runs << ','
          << (p.estimated_seconds ? fmt(*p.estimated_seconds) : "") << '\n';
    }
  }
  return out.str();
}

std::string summary_table(const std::vector<CoverageCurve>& curves, const std::vector<int>& steps) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-24s %4s", "mode", "N");
  out << buf;
  for (int k : steps) {
    std::snprintf(buf, sizeof buf, " %9s", ("k=" + std::to_string(k)).c_str());
    out << buf;
  }
  out << '\n';
  for (const CoverageCurve& c : curves) {
    std::snprintf(buf, sizeof buf, "%-24s %4d", std::string(sched::mode_name(c.mode)).c_str(),
                  c.n_agents);
    out << buf;
    for (int k : steps) {
      if (k < 0 || k >= static_cast<int>(c.points.size())) {
        out << "         -";
        continue;
      }
      std::snprintf(buf, sizeof buf, " %9.4f", c.points[k].mean);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cothink::eval
