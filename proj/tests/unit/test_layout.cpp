// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "cothink/sched/layout.hpp"
#include "cothink/sched/schedule.hpp"

namespace cothink::sched {
namespace {

using TC = TokenCoordinate;

GroupConfig cfg(int n, int k, Mode mode, int p = 0, int a = 0) {
  GroupConfig c;
  c.n_agents = n;
  c.budget = k;
  c.mode = mode;
  c.prompt_len = p;
  c.agent_prompt_len = a;
  return c;
}

constexpr Mode kAllModes[] = {Mode::kGroupLockstep, Mode::kGroupInterleaved, Mode::kIndependent,
                              Mode::kSingleChain};

TEST(BuildMask, MatchesOracleOnSmallGrid) {
  for (Mode mode : kAllModes) {
    for (int n = 1; n <= 3; ++n) {
      if (mode == Mode::kSingleChain && n != 1) continue;
      for (int k = 1; k <= 4; ++k) {
        for (int p : {0, 2}) {
          for (int a : {0, 1, 2}) {
            if (p + a == 0) continue;
            const GroupConfig c = cfg(n, k, mode, p, a);
            for (int steps = 0; steps <= k; ++steps) {
              AttentionMask m = build_mask(c, steps);
              for (std::size_t r = 0; r < m.size(); ++r) {
                EXPECT_EQ(m.visible(r), visibility_oracle(c, m.timeline[r], steps))
                    << mode_name(mode) << " N=" << n << " K=" << k << " P=" << p << " A=" << a
                    << " steps=" << steps << " row " << to_string(m.timeline[r]);
              }
            }
          }
        }
      }
    }
  }
}

TEST(BuildMask, SingleAgentIsLowerTriangular) {
  for (Mode mode : kAllModes) {
    const GroupConfig c = cfg(1, 5, mode, 3, 2);
    for (int steps = 0; steps <= 5; ++steps) {
      AttentionMask m = build_mask(c, steps);
      for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) EXPECT_EQ(m.bits.get(i, j), j <= i);
      }
    }
  }
}

TEST(BuildMask, SingleAgentModesAgree) {
  const AttentionMask ref = build_mask(cfg(1, 6, Mode::kSingleChain, 2, 1));
  for (Mode mode : {Mode::kGroupLockstep, Mode::kGroupInterleaved, Mode::kIndependent}) {
    AttentionMask m = build_mask(cfg(1, 6, mode, 2, 1));
    EXPECT_EQ(m.timeline, ref.timeline);
    EXPECT_EQ(m.positions, ref.positions);
    EXPECT_EQ(m.bits, ref.bits);
  }
}

TEST(BuildMask, LockstepTwoByTwoHandEnumerated) {
  AttentionMask m = build_mask(cfg(2, 2, Mode::kGroupLockstep));
  const std::vector<TC> tl{TC::thought(1, 1), TC::thought(2, 1), TC::thought(1, 2),
                           TC::thought(2, 2)};
  ASSERT_EQ(m.timeline, tl);
  // Step-1 rows drive step 2 and see both step-1 tokens; step-2 rows see all.
  const bool want[4][4] = {{1, 1, 0, 0}, {1, 1, 0, 0}, {1, 1, 1, 1}, {1, 1, 1, 1}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(m.bits.get(i, j), want[i][j]) << i << "," << j;
  }
  EXPECT_EQ(m.positions, (std::vector<int>{3, 3, 4, 4}));
}

TEST(BuildMask, IndependentIsBlockDiagonalPlusPrompt) {
  const GroupConfig c = cfg(2, 3, Mode::kIndependent, 2, 1);
  AttentionMask m = build_mask(c);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (!m.bits.get(i, j)) continue;
      const TC& row = m.timeline[i];
      const TC& col = m.timeline[j];
      EXPECT_TRUE(col.role == Role::kPrompt || col.agent == row.agent)
          << to_string(row) << " sees " << to_string(col);
    }
    for (int p = 0; p < 2; ++p) EXPECT_TRUE(m.bits.get(i, *m.index_of(TC::prompt(p))) ||
                                            m.timeline[i] == TC::prompt(0));
  }
}

TEST(BuildMask, EarlyStopLeavesHoles) {
  const GroupConfig c = cfg(2, 4, Mode::kGroupLockstep, 1, 1);
  const std::vector<int> len{2, 4};
  AttentionMask m = build_mask(c, 4, len);
  EXPECT_FALSE(m.index_of(TC::thought(1, 3)));
  for (std::size_t r = 0; r < m.size(); ++r) {
    EXPECT_EQ(m.visible(r), visibility_oracle(c, m.timeline[r], 4, len));
  }
  // Agent 2 keeps attending to agent 1's frozen chain.
  auto row = m.visible(*m.index_of(TC::thought(2, 4)));
  EXPECT_TRUE(std::binary_search(row.begin(), row.end(), TC::thought(1, 2)));
}

TEST(PhysicalLayout, RowsOnlyReferenceEarlierContextEntries) {
  for (Mode mode : kAllModes) {
    const int n = mode == Mode::kSingleChain ? 1 : 3;
    PhysicalLayout layout = build_physical_layout(cfg(n, 3, mode, 2, 2));
    for (const PhysicalSequence& s : layout.sequences) {
      for (std::size_t i = 0; i < s.entries.size(); ++i) {
        EXPECT_TRUE(s.mask.get(i, i));
        for (std::size_t j = i + 1; j < s.entries.size(); ++j) EXPECT_FALSE(s.mask.get(i, j));
        for (std::size_t j = 0; j < i; ++j) {
          if (s.mask.get(i, j)) EXPECT_EQ(s.entries[j].kind, EntryKind::kContext);
        }
      }
    }
  }
}

TEST(PhysicalLayout, LocalSequencesHoldReservedCopies) {
  const GroupConfig c = cfg(3, 2, Mode::kGroupLockstep, 1, 0);
  PhysicalLayout layout = build_physical_layout(c);
  ASSERT_EQ(layout.sequences.size(), 3u);
  const PhysicalSequence& s2 = layout.sequences[1];
  std::vector<std::pair<TC, int>> got;
  for (const LayoutEntry& e : s2.entries) got.emplace_back(e.coord, e.position);
  const std::vector<std::pair<TC, int>> want{
      {TC::prompt(0), 1},     {TC::thought(1, 1), 2}, {TC::thought(3, 1), 4},
      {TC::thought(2, 1), 6}, {TC::thought(1, 2), 3}, {TC::thought(3, 2), 5},
      {TC::thought(2, 2), 7}};
  EXPECT_EQ(got, want);
  // The copy of (3,1) at position 4 cannot see position 3, which is still a hole.
  EXPECT_TRUE(s2.mask.get(2, 0));
  EXPECT_TRUE(s2.mask.get(2, 1));
}

TEST(PhysicalLayout, SlotLayoutInsertionOrderDisagreesWithPositions) {
  const GroupConfig c = cfg(2, 3, Mode::kGroupInterleaved, 2, 1);
  PhysicalLayout layout = build_physical_layout(c);
  ASSERT_EQ(layout.sequences.size(), 1u);
  bool out_of_order = false;
  int last = 0;
  for (const LayoutEntry& e : layout.sequences[0].entries) {
    if (e.kind != EntryKind::kContext) continue;
    if (e.position < last) out_of_order = true;
    last = e.position;
  }
  EXPECT_TRUE(out_of_order);
}

TEST(PhysicalLayout, WorkedExampleSlotPositions) {
  const GroupConfig c = cfg(2, 50, Mode::kGroupInterleaved, 100, 10);
  PhysicalLayout layout = build_physical_layout(c, 1);
  std::vector<int> thought_positions;
  for (const LayoutEntry& e : layout.sequences[0].entries) {
    if (e.kind == EntryKind::kContext && e.coord.role == Role::kThought) {
      thought_positions.push_back(e.position);
    }
  }
  EXPECT_EQ(thought_positions, (std::vector<int>{111, 171}));
}

TEST(DumpLayout, JsonCarriesHexRows) {
  const GroupConfig c = cfg(2, 2, Mode::kGroupInterleaved, 1, 1);
  PhysicalLayout layout = build_physical_layout(c);
  AttentionMask m = project_mask(layout);
  auto j = nlohmann::json::parse(dump_layout_json(layout, m));
  ASSERT_EQ(j["mask"].size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    BitMatrix back(m.size());
    back.set_row_hex(0, j["mask"][i]["row"].get<std::string>());
    for (std::size_t col = 0; col < m.size(); ++col) EXPECT_EQ(back.get(0, col), m.bits.get(i, col));
    EXPECT_EQ(j["mask"][i]["position"].get<int>(), m.positions[i]);
  }
  EXPECT_EQ(j["config"]["mode"], "group_think_interleaved");
  EXPECT_EQ(j["sequences"].size(), 1u);
}

}  // namespace
}  // namespace cothink::sched
