// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/verify/invariants.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "cothink/engine/decode.hpp"
#include "cothink/engine/model_source.hpp"
#include "cothink/engine/scripted_source.hpp"
#include "cothink/eval/coverage.hpp"
#include "cothink/eval/sweep.hpp"
#include "cothink/latency/roofline.hpp"
#include "cothink/model/kv_cache.hpp"
#include "cothink/sched/schedule.hpp"

namespace cothink::verify {

using sched::GroupConfig;
using sched::Mode;
using TC = TokenCoordinate;

namespace {

constexpr Mode kAllModes[] = {Mode::kGroupLockstep, Mode::kGroupInterleaved, Mode::kIndependent,
                              Mode::kSingleChain};

double rel_error(std::span<const float> a, std::span<const float> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(double(a[i]) - double(b[i])));
    den = std::max(den, std::abs(double(b[i])));
  }
  return num / std::max(den, 1e-30);
}

GroupConfig make_config(int n, int k, Mode mode, int p, int a) {
  GroupConfig c;
  c.n_agents = n;
  c.budget = k;
  c.mode = mode;
  c.prompt_len = p;
  c.agent_prompt_len = a;
  return c;
}

std::string describe(const GroupConfig& c) {
  std::ostringstream s;
  s << sched::mode_name(c.mode) << " N=" << c.n_agents << " K=" << c.budget << " P=" << c.prompt_len
    << " A=" << c.agent_prompt_len;
  return s.str();
}

model::TokenId token_of(const engine::Transcript& t, const TC& c) {
  switch (c.role) {
    case Role::kPrompt:
      return t.prompt.prompt.at(c.offset);
    case Role::kAgentPrompt:
      return t.prompt.headers.at(c.agent - 1).at(c.offset);
    case Role::kThought:
      for (const auto& e : t.events) {
        if (e.coord == c) return e.token;
      }
      break;
    case Role::kAnswer:
      break;
  }
  throw std::logic_error("no token for " + to_string(c));
}

engine::Transcript run_toy(const model::Model& m, const GroupConfig& cfg,
                           const engine::SessionPrompt& p, const engine::SamplerConfig& s,
                           std::map<TC, std::vector<float>>* logits = nullptr) {
  engine::ModelSource src(m);
  if (logits) {
    src.set_observer([logits](const TC& c, std::span<const float> l) {
      (*logits)[c] = std::vector<float>(l.begin(), l.end());
    });
  }
  engine::Sampler sampler(s);
  return engine::run_think_phase(cfg, src, p, sampler);
}

GroupConfig config_for(const engine::SessionPrompt& p, int n, int k, Mode mode) {
  return make_config(n, k, mode, p.prompt_len(), p.header_len());
}

}  // namespace

model::Logits replay_sequence(const model::Model& model, const sched::PhysicalSequence& seq,
                              std::span<const model::TokenId> tokens) {
  model::KVCache cache(model.config().num_layers, model.width());
  model::Logits out{seq.entries.size(), static_cast<std::size_t>(model.config().vocab_size), {}};
  out.values.resize(out.rows * out.vocab);
  for (std::size_t i = 0; i < seq.entries.size(); ++i) {
    const sched::LayoutEntry& e = seq.entries[i];
    std::vector<TC> visible;
    for (std::size_t j = 0; j < i; ++j) {
      if (seq.mask.get(i, j)) visible.push_back(seq.entries[j].coord);
    }
    const model::NewToken tok{tokens[i], e.position, e.coord};
    model::Logits l;
    if (e.kind == sched::EntryKind::kProbe) {
      l = model::forward_probe(model, cache, tok, visible);
    } else {
      l = model::forward_incremental(model, cache, std::span(&tok, 1), std::span(&visible, 1));
    }
    std::copy(l.values.begin(), l.values.end(), out.row(i).begin());
  }
  return out;
}

eval::Matrix dijkstra_all_pairs(const eval::Matrix& w) {
  const int n = static_cast<int>(w.size());
  eval::Matrix out(n, std::vector<double>(n, eval::kInfinity));
  for (int s = 0; s < n; ++s) {
    std::vector<double>& dist = out[s];
    dist[s] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, s});
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int v = 0; v < n; ++v) {
        if (v == u || std::isinf(w[u][v])) continue;
        if (d + w[u][v] < dist[v]) {
          dist[v] = d + w[u][v];
          pq.push({dist[v], v});
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Positions

Outcome check_slot_positions() {
  Outcome o;
  const GroupConfig c = make_config(2, 50, Mode::kGroupInterleaved, 100, 10);
  const auto slots = sched::assign_slots_interleaved(c);
  if (slots.size() != 2) {
    o.fail("expected two slots");
    return o;
  }
  const int want_first[] = {111, 171};
  for (int n = 1; n <= 2; ++n) {
    ++o.cases;
    const int first = slots[n - 1].first_output();
    const int last = first + c.budget - 1;
    if (first != want_first[n - 1] || last != want_first[n - 1] + 49) {
      o.fail("agent " + std::to_string(n) + " outputs at " + std::to_string(first) + ".." +
             std::to_string(last));
    }
    for (int k = 1; k <= c.budget; ++k) {
      ++o.cases;
      const int pos = sched::own_position(c, TC::thought(n, k));
      if (pos != want_first[n - 1] + k - 1) {
        o.fail("(" + std::to_string(n) + "," + std::to_string(k) + ") at " + std::to_string(pos));
      }
    }
  }
  return o;
}

Outcome check_local_positions(int max_agents, int max_budget) {
  Outcome o;
  for (int n = 1; n <= max_agents; ++n) {
    for (int k_total = 1; k_total <= max_budget; ++k_total) {
      for (int p : {0, 3, 100}) {
        for (int a : {0, 10}) {
          const GroupConfig c = make_config(n, k_total, Mode::kGroupLockstep, p, a);
          for (int agent = 1; agent <= n; ++agent) {
            for (int k = 1; k <= k_total; ++k) {
              ++o.cases;
              const int want = p + a + k_total * (n - 1) + k;
              const int got = sched::assign_position_local(c, agent, k);
              if (got != want) {
                o.fail(describe(c) + " agent " + std::to_string(agent) + " k=" + std::to_string(k) +
                       ": " + std::to_string(got) + " != " + std::to_string(want));
              }
            }
          }
        }
      }
    }
  }
  return o;
}

// ---------------------------------------------------------------------------
// Masks

Outcome check_mask_oracle(const MaskBuilder& build, const MaskGrid& grid, std::uint64_t seed) {
  Outcome o;
  std::mt19937_64 rng(seed);
  for (Mode mode : kAllModes) {
    for (int n = 1; n <= grid.max_agents; ++n) {
      if (mode == Mode::kSingleChain && n != 1) continue;
      for (int k = 1; k <= grid.max_budget; ++k) {
        for (int p : grid.prompt_lens) {
          for (int a : grid.header_lens) {
            if (p + a == 0) continue;
            const GroupConfig c = make_config(n, k, mode, p, a);
            std::vector<std::vector<int>> variants{{}};
            if (grid.early_stops) {
              std::vector<int> len(n);
              for (int& l : len) l = static_cast<int>(rng() % (k + 1));
              variants.push_back(len);
            }
            for (const auto& len : variants) {
              const sched::AttentionMask m = build(c, k, len);
              const auto timeline = sched::timeline(c, k, len);
              ++o.cases;
              if (m.timeline != timeline) {
                o.fail(describe(c) + ": timeline differs");
                continue;
              }
              for (std::size_t r = 0; r < m.size(); ++r) {
                if (m.visible(r) != sched::visibility_oracle(c, m.timeline[r], k, len)) {
                  o.fail(describe(c) + ": row " + to_string(m.timeline[r]) +
                         " differs from the oracle");
                  break;
                }
              }
            }
          }
        }
      }
    }
  }
  return o;
}

Outcome check_interleaved_within_step(const MaskBuilder& build) {
  Outcome o;
  for (int n = 2; n <= 4; ++n) {
    const GroupConfig c = make_config(n, 4, Mode::kGroupInterleaved, 2, 1);
    const sched::AttentionMask m = build(c, c.budget, {});
    for (int agent = 1; agent <= n; ++agent) {
      for (int t = 1; t <= c.budget; ++t) {
        // The row generating (agent, t): its last header token or previous thought.
        const TC driver = t == 1 ? TC::header(agent, c.agent_prompt_len - 1) : TC::thought(agent, t - 1);
        const auto row = m.index_of(driver);
        if (!row) {
          o.fail("missing row " + to_string(driver));
          continue;
        }
        for (int other = 1; other <= n; ++other) {
          if (other == agent) continue;
          ++o.cases;
          const auto col = m.index_of(TC::thought(other, t));
          const bool sees = col && m.bits.get(*row, *col);
          if (sees != (other < agent)) {
            o.fail("N=" + std::to_string(n) + ": generating " + to_string(TC::thought(agent, t)) +
                   (sees ? " sees " : " misses ") + to_string(TC::thought(other, t)));
          }
        }
      }
    }
  }
  return o;
}

// ---------------------------------------------------------------------------
// Model and engine

Outcome check_single_agent_reduction(const model::Model& m, int seeds, int budget) {
  Outcome o;
  const engine::SessionPrompt p = engine::make_session_prompt("Think:", "T{n}>", 1, "A:");
  for (int s = 0; s < seeds; ++s) {
    engine::SamplerConfig sc;
    sc.temperature = 0.8;
    sc.seed = 1000 + static_cast<std::uint64_t>(s);
    const engine::Transcript ref = run_toy(m, config_for(p, 1, budget, Mode::kSingleChain), p, sc);
    for (Mode mode : {Mode::kGroupLockstep, Mode::kGroupInterleaved, Mode::kIndependent}) {
      ++o.cases;
      const engine::Transcript t = run_toy(m, config_for(p, 1, budget, mode), p, sc);
      if (t.events != ref.events) {
        o.fail(std::string(sched::mode_name(mode)) + " differs from single_cot at seed " +
               std::to_string(sc.seed));
      }
    }
  }
  return o;
}

namespace {

// A random cache workload whose insertion order disagrees with positions.
struct RandomCase {
  sched::PhysicalSequence seq;
  std::vector<model::TokenId> tokens;
};

RandomCase random_mask_case(std::mt19937_64& rng, int len, int vocab) {
  RandomCase rc;
  std::vector<int> positions(len);
  for (int& p : positions) p = 1 + static_cast<int>(rng() % (3 * len));
  rc.seq.mask = BitMatrix(len);
  for (int i = 0; i < len; ++i) {
    rc.seq.entries.push_back({TC::prompt(i), positions[i], sched::EntryKind::kContext, std::nullopt});
    rc.seq.mask.set(i, i);
    for (int j = 0; j < i; ++j) {
      if (rng() % 3 != 0) rc.seq.mask.set(i, j);
    }
    rc.tokens.push_back(static_cast<model::TokenId>(rng() % vocab));
  }
  return rc;
}

}  // namespace

Outcome check_incremental_full(std::uint64_t seed, int cases, int max_len) {
  Outcome o;
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c) {
    model::ModelConfig mc;
    mc.num_layers = 1 + static_cast<int>(rng() % 2);
    mc.num_heads = 1 + static_cast<int>(rng() % 3);
    mc.head_dim = 4 * (1 + static_cast<int>(rng() % 2));
    mc.vocab_size = 16 + static_cast<int>(rng() % 300);
    mc.seed = rng();
    const model::Model m = model::Model::init(mc);

    std::vector<RandomCase> work;
    if (c % 3 == 2) {
      work.push_back(random_mask_case(rng, 2 + static_cast<int>(rng() % (max_len - 1)), mc.vocab_size));
    } else {
      // Interleaved slot layouts on even cases, agent-batch on the rest.
      const Mode mode = c % 3 == 0 ? Mode::kGroupInterleaved
                                   : kAllModes[rng() % 3 == 0 ? 2 : 0];
      GroupConfig g;
      do {
        g = make_config(2 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 8), mode,
                        static_cast<int>(rng() % 5), static_cast<int>(rng() % 3));
        if (g.prompt_len + g.agent_prompt_len == 0) g.prompt_len = 1;
      } while (g.max_position() > max_len);
      std::vector<int> len(g.n_agents);
      for (int& l : len) l = static_cast<int>(rng() % (g.budget + 1));
      for (auto& seq : sched::build_physical_layout(g, g.budget, len).sequences) {
        RandomCase rc{seq, {}};
        for (std::size_t i = 0; i < seq.entries.size(); ++i) {
          rc.tokens.push_back(static_cast<model::TokenId>(rng() % mc.vocab_size));
        }
        // Probes replay their input token.
        std::map<TC, model::TokenId> by_coord;
        for (std::size_t i = 0; i < seq.entries.size(); ++i) {
          auto [it, fresh] = by_coord.emplace(seq.entries[i].coord, rc.tokens[i]);
          if (!fresh) rc.tokens[i] = it->second;
        }
        work.push_back(std::move(rc));
      }
    }
    ++o.cases;
    for (const RandomCase& rc : work) {
      if (rc.seq.entries.empty()) continue;
      std::vector<int> positions;
      for (const auto& e : rc.seq.entries) positions.push_back(e.position);
      const model::Logits full = model::forward_full(m, rc.tokens, positions, rc.seq.mask);
      const model::Logits inc = replay_sequence(m, rc.seq, rc.tokens);
      for (std::size_t r = 0; r < full.rows; ++r) {
        const double err = rel_error(inc.row(r), full.row(r));
        if (!(err <= 1e-5)) {
          o.fail("case " + std::to_string(c) + " row " + std::to_string(r) + ": relative error " +
                 std::to_string(err));
          break;
        }
      }
    }
  }
  return o;
}

Outcome check_conditioning_fidelity(const model::Model& m, std::uint64_t seed, int budget) {
  Outcome o;
  for (Mode mode : kAllModes) {
    for (int n : {1, 3}) {
      if (mode == Mode::kSingleChain && n != 1) continue;
      const engine::SessionPrompt p = engine::make_session_prompt("List colors.", "T{n}:", n, "A:");
      const GroupConfig cfg = config_for(p, n, budget, mode);
      engine::SamplerConfig sc;
      sc.temperature = 1.0;
      sc.seed = seed;
      std::map<TC, std::vector<float>> captured;
      const engine::Transcript t = run_toy(m, cfg, p, sc, &captured);
      const auto lengths = t.lengths();
      const auto layout = sched::build_physical_layout(cfg, cfg.budget, lengths);
      const bool local = sched::uses_agent_batch_layout(mode);
      std::vector<model::Logits> full;
      for (const auto& seq : layout.sequences) {
        std::vector<model::TokenId> tokens;
        std::vector<int> positions;
        for (const auto& e : seq.entries) {
          tokens.push_back(token_of(t, e.coord));
          positions.push_back(e.position);
        }
        full.push_back(model::forward_full(m, tokens, positions, seq.mask));
      }
      for (const auto& [target, logits] : captured) {
        ++o.cases;
        const auto input = sched::input_coordinate(cfg, target);
        const std::size_t s = local ? static_cast<std::size_t>(target.agent - 1) : 0;
        const auto& entries = layout.sequences[s].entries;
        auto it = std::find_if(entries.begin(), entries.end(), [&](const sched::LayoutEntry& e) {
          return local ? e.kind == sched::EntryKind::kContext && e.coord == *input
                       : e.kind == sched::EntryKind::kProbe && e.target == target;
        });
        if (it == entries.end()) {
          o.fail(describe(cfg) + ": no generating row for " + to_string(target));
          continue;
        }
        const double err = rel_error(logits, full[s].row(static_cast<std::size_t>(it - entries.begin())));
        if (!(err <= 1e-5)) {
          o.fail(describe(cfg) + ": " + to_string(target) + " relative error " + std::to_string(err));
        }
      }
    }
  }
  return o;
}

Outcome check_transcript_replay(const model::Model& m, std::uint64_t seed) {
  Outcome o;
  for (Mode mode : {Mode::kGroupLockstep, Mode::kGroupInterleaved, Mode::kIndependent}) {
    ++o.cases;
    const engine::SessionPrompt p = engine::make_session_prompt("Go.", "T{n}:", 3, "A:");
    engine::SamplerConfig sc;
    sc.temperature = 0.9;
    sc.seed = seed;
    const engine::Transcript t = run_toy(m, config_for(p, 3, 8, mode), p, sc);
    std::istringstream in(engine::transcript_to_jsonl(t));
    const engine::Transcript back = engine::read_transcript(in);
    engine::ModelSource src(m);
    const engine::Transcript again = engine::replay_think_phase(back, src);
    if (back.events != t.events || again.events != t.events) {
      o.fail(std::string(sched::mode_name(mode)) + ": replay differs");
    }
    if (auto problem = engine::check_transcript(back)) o.fail(*problem);
  }
  return o;
}

// ---------------------------------------------------------------------------
// Evaluation

Outcome check_fw_against_dijkstra(std::uint64_t seed, int graphs, int max_nodes) {
  Outcome o;
  std::mt19937_64 rng(seed);
  for (int g = 0; g < graphs; ++g) {
    const int n = 1 + static_cast<int>(rng() % max_nodes);
    eval::WeightedGraph graph{eval::Matrix(n, std::vector<double>(n, 0.0))};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) graph.weights[i][j] = rng() % 5 == 0 ? eval::kInfinity : double(rng() % 20);
      }
    }
    ++o.cases;
    const eval::Matrix d = eval::floyd_warshall(graph);
    if (d != dijkstra_all_pairs(graph.weights)) {
      o.fail("graph " + std::to_string(g) + " (|V|=" + std::to_string(n) + ") disagrees");
      continue;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (d[i][j] > graph.weights[i][j]) o.fail("distance exceeds the edge weight");
        for (int k = 0; k < n; ++k) {
          if (d[i][j] > d[i][k] + d[k][j]) o.fail("triangle inequality violated");
        }
      }
    }
  }
  return o;
}

Outcome check_fw_benchmark_step() {
  Outcome o;
  constexpr double I = eval::kInfinity;
  const eval::Matrix e{{0, 4, I, 5, I}, {I, 0, 1, I, 6}, {2, I, 0, 3, I}, {I, I, 1, 0, 2}, {1, I, I, 4, 0}};
  const eval::Matrix got = eval::fw_step_oracle(e, 0);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      ++o.cases;
      const double direct = std::min(e[i][j], e[i][0] + e[0][j]);
      if (got[i][j] != direct) {
        o.fail("entry (" + std::to_string(i) + "," + std::to_string(j) + ") is " +
               eval::format_weight(got[i][j]) + ", update gives " + eval::format_weight(direct));
      }
    }
  }
  o.cases += 2;
  if (got[2][1] != 6) o.fail("entry (2,1) is " + eval::format_weight(got[2][1]) + ", expected 6");
  if (got[4][1] != 5) o.fail("entry (4,1) is " + eval::format_weight(got[4][1]) + ", expected 5");
  return o;
}

Outcome check_analytic_curves(int max_k) {
  Outcome o;
  eval::Task task;
  task.id = "analytic";
  task.kind = eval::TaskKind::kEnumeration;
  task.prompt = "List items.";
  task.target_count = 100;
  eval::SweepSpec spec;
  spec.task = task;
  spec.modes = {Mode::kGroupLockstep};
  spec.n_agents = {1, 2, 4};
  spec.budget = max_k;
  spec.make_source = [task, max_k](const GroupConfig& cfg, int) {
    return std::make_unique<engine::ScriptedSource>(
        eval::scripted_policy(eval::Policy::kPartition, task, cfg.n_agents, max_k, 0));
  };
  const auto curves = eval::sweep(spec);
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      ++o.cases;
      const double want = std::min(1.0, static_cast<double>(c.n_agents * p.k) / 100);
      if (p.mean != want) {
        o.fail("N=" + std::to_string(c.n_agents) + " k=" + std::to_string(p.k) + ": " +
               std::to_string(p.mean) + " != " + std::to_string(want));
      }
    }
    const int saturate = (100 + c.n_agents - 1) / c.n_agents;
    if (saturate <= max_k) {
      ++o.cases;
      const bool reaches = c.points[saturate].mean == 1.0 && c.points[saturate - 1].mean < 1.0;
      if (!reaches) o.fail("N=" + std::to_string(c.n_agents) + " does not saturate at k=" + std::to_string(saturate));
    }
  }
  return o;
}

Outcome check_coverage_properties(std::uint64_t seed, int transcripts) {
  Outcome o;
  std::mt19937_64 rng(seed);
  constexpr double I = eval::kInfinity;
  eval::Task fw;
  fw.kind = eval::TaskKind::kFloydWarshall;
  fw.graph.weights = {{0, 4, I, 5, I}, {I, 0, 1, I, 6}, {2, I, 0, 3, I}, {I, I, 1, 0, 2}, {1, I, I, 4, 0}};
  const eval::Matrix oracle = fw.fw_oracle();
  for (int t = 0; t < transcripts; ++t) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int k = 1 + static_cast<int>(rng() % 10);
    const bool is_fw = t % 2 == 1;
    eval::Task en;
    en.kind = eval::TaskKind::kEnumeration;
    en.target_count = 1 + static_cast<int>(rng() % 12);
    std::vector<engine::ScriptProgram> programs;
    for (int a = 0; a < n; ++a) {
      std::vector<std::string> items;
      for (int s = 0; s < k; ++s) {
        if (is_fw) {
          const int i = static_cast<int>(rng() % 5), j = static_cast<int>(rng() % 5);
          const double v = rng() % 2 ? oracle[i][j] : double(rng() % 9);
          items.push_back(rng() % 7 == 0 ? "REGISTER Edges[x][1] = 3"
                                          : "REGISTER Edges[" + std::to_string(i) + "][" +
                                                std::to_string(j) + "] = " + eval::format_weight(v));
        } else {
          items.push_back((rng() % 2 ? "Item " : "item ") + std::to_string(rng() % 15));
        }
      }
      programs.push_back(engine::fixed_program(items));
    }
    const GroupConfig cfg = make_config(n, k, kAllModes[rng() % 3], 1, 0);
    const engine::SessionPrompt p = engine::make_session_prompt("q", "", n, "");
    engine::ScriptedSource src(programs);
    engine::Sampler sampler(engine::SamplerConfig{});
    const engine::Transcript tr = engine::run_think_phase(cfg, src, p, sampler);
    const eval::Task& task = is_fw ? fw : en;
    const auto cov = eval::prefix_coverage(task, tr, k);
    ++o.cases;
    for (int s = 0; s <= k; ++s) {
      if (!(cov[s] >= 0.0 && cov[s] <= 1.0)) o.fail("coverage out of [0,1] at k=" + std::to_string(s));
      if (s > 0 && cov[s] < cov[s - 1]) o.fail("coverage decreased at k=" + std::to_string(s));
      if (!is_fw) {
        std::vector<std::string> texts;
        for (int a = 1; a <= n; ++a) texts.push_back(tr.chain_text(a, s));
        std::set<std::string> distinct;
        for (const auto& text : texts) distinct.merge(eval::extract_items(text));
        if (static_cast<int>(distinct.size()) >= en.target_count && cov[s] != 1.0) {
          o.fail("cap does not bind with " + std::to_string(distinct.size()) + " items, L=" +
                 std::to_string(en.target_count));
        }
      }
    }
  }
  return o;
}

Outcome check_latency_model(std::uint64_t seed, int profiles) {
  Outcome o;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * u(rng)); };
  for (int i = 0; i < profiles; ++i) {
    const latency::HardwareProfile p{draw(10, 13), draw(12, 15), draw(8, 11), draw(8, 11), 0.0};
    const double cross = latency::crossover_batch(p);
    const double base = latency::step_latency(p, 1);
    const int flat_limit = static_cast<int>(std::min(cross, 100000.0));
    for (int n = 1; n <= flat_limit; ++n) {
      ++o.cases;
      if (latency::step_latency(p, n) != base) {
        o.fail("profile " + std::to_string(i) + ": latency changes at N=" + std::to_string(n) +
               " below crossover " + std::to_string(cross));
        break;
      }
    }
    if (cross > 100000.0) continue;
    const int first = std::max(1, static_cast<int>(std::floor(cross)));
    double prev = latency::step_latency(p, first);
    for (int n = first + 1; n <= first + 200; ++n) {
      ++o.cases;
      const double cur = latency::step_latency(p, n);
      if (!(cur > prev)) {
        o.fail("profile " + std::to_string(i) + ": not increasing at N=" + std::to_string(n));
        break;
      }
      prev = cur;
    }
  }
  ++o.cases;
  const double example = latency::crossover_batch({1e12, 1e14, 16e9, 32e9, 0.0});
  if (std::abs(example - 50.0) > 1e-12 * 50.0) {
    o.fail("example crossover " + std::to_string(example) + " != 50");
  }
  return o;
}

// ---------------------------------------------------------------------------
// Suite

namespace {

struct NamedCheck {
  const char* name;
  std::function<Outcome(const SuiteOptions&, const model::Model&)> run;
};

std::vector<NamedCheck> suite() {
  return {
      {"layout.slot_positions", [](const SuiteOptions&, const model::Model&) { return check_slot_positions(); }},
      {"layout.local_positions",
       [](const SuiteOptions&, const model::Model&) { return check_local_positions(8, 64); }},
      {"mask.oracle_conformance",
       [](const SuiteOptions& o, const model::Model&) {
         return check_mask_oracle(o.mask_builder, MaskGrid{}, o.seed);
       }},
      {"mask.interleaved_within_step",
       [](const SuiteOptions& o, const model::Model&) { return check_interleaved_within_step(o.mask_builder); }},
      {"model.incremental_full",
       [](const SuiteOptions& o, const model::Model&) { return check_incremental_full(o.seed, 50, 64); }},
      {"engine.single_agent_reduction",
       [](const SuiteOptions&, const model::Model& m) { return check_single_agent_reduction(m, 20, 16); }},
      {"engine.conditioning_fidelity",
       [](const SuiteOptions& o, const model::Model& m) { return check_conditioning_fidelity(m, o.seed, 6); }},
      {"engine.transcript_replay",
       [](const SuiteOptions& o, const model::Model& m) { return check_transcript_replay(m, o.seed); }},
      {"coverage.fw_dijkstra",
       [](const SuiteOptions& o, const model::Model&) { return check_fw_against_dijkstra(o.seed, 100, 6); }},
      {"coverage.fw_benchmark_step",
       [](const SuiteOptions&, const model::Model&) { return check_fw_benchmark_step(); }},
      {"coverage.analytic_curves",
       [](const SuiteOptions&, const model::Model&) { return check_analytic_curves(128); }},
      {"coverage.properties",
       [](const SuiteOptions& o, const model::Model&) { return check_coverage_properties(o.seed, 1000); }},
      {"latency.roofline",
       [](const SuiteOptions& o, const model::Model&) { return check_latency_model(o.seed, 100); }},
  };
}

}  // namespace

std::vector<std::string> suite_check_names() {
  std::vector<std::string> out;
  for (const auto& c : suite()) out.emplace_back(c.name);
  return out;
}

std::vector<CheckResult> run_suite(const SuiteOptions& options) {
  SuiteOptions opts = options;
  if (!opts.mask_builder) {
    opts.mask_builder = [](const GroupConfig& c, int steps, std::span<const int> len) {
      return sched::build_mask(c, steps, len);
    };
  }
  const model::Model m = model::Model::init(opts.model);
  std::vector<CheckResult> out;
  for (const auto& c : suite()) {
    if (!opts.filter.empty() && std::string(c.name).find(opts.filter) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult r{c.name, {}, 0.0};
    try {
      r.outcome = c.run(opts, m);
    } catch (const std::exception& e) {
      r.outcome.fail(std::string("threw: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cothink::verify
