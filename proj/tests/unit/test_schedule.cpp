// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "cothink/errors.hpp"
#include "cothink/sched/schedule.hpp"

namespace cothink::sched {
namespace {

using TC = TokenCoordinate;
using Kind = GenerationEvent::Kind;

GroupConfig cfg(int n, int k, Mode mode, int p = 0, int a = 0) {
  GroupConfig c;
  c.n_agents = n;
  c.budget = k;
  c.mode = mode;
  c.prompt_len = p;
  c.agent_prompt_len = a;
  return c;
}

TEST(GroupConfig, ParsesBothNameForms) {
  EXPECT_EQ(parse_mode("gt-lockstep"), Mode::kGroupLockstep);
  EXPECT_EQ(parse_mode("group_think_interleaved"), Mode::kGroupInterleaved);
  EXPECT_EQ(parse_mode("is"), Mode::kIndependent);
  EXPECT_EQ(parse_mode("single_cot"), Mode::kSingleChain);
  EXPECT_THROW(parse_mode("beam"), ValidationError);
}

TEST(GroupConfig, SingleChainForcesOneAgent) {
  EXPECT_THROW(cfg(2, 4, Mode::kSingleChain).validate(), ValidationError);
  EXPECT_NO_THROW(cfg(1, 4, Mode::kSingleChain).validate());
}

TEST(GroupConfig, RejectsZeroBudgetAndContextOverflow) {
  EXPECT_THROW(cfg(2, 0, Mode::kGroupLockstep).validate(), ValidationError);
  EXPECT_THROW(cfg(4, 64, Mode::kGroupLockstep, 10, 2).validate(100), ValidationError);
}

TEST(AssignPositionLocal, TwoAgentsFiftyTokens) {
  EXPECT_EQ(assign_position_local(cfg(2, 50, Mode::kGroupLockstep), 1, 1), 51);
}

TEST(AssignPositionLocal, SingleAgentIsContiguous) {
  for (int k = 1; k <= 9; ++k) {
    EXPECT_EQ(assign_position_local(cfg(1, 9, Mode::kGroupLockstep, 4, 2), 1, k), 6 + k);
  }
}

TEST(AssignPositionLocal, FourAgentsWithPrompt) {
  // 20 + 10 * 3 + 10
  EXPECT_EQ(assign_position_local(cfg(4, 10, Mode::kGroupLockstep, 20, 0), 3, 10), 60);
}

TEST(AssignPositionLocal, RejectsOutOfRange) {
  const GroupConfig c = cfg(2, 5, Mode::kGroupLockstep);
  EXPECT_THROW(assign_position_local(c, 0, 1), ValidationError);
  EXPECT_THROW(assign_position_local(c, 3, 1), ValidationError);
  EXPECT_THROW(assign_position_local(c, 1, 6), ValidationError);
}

TEST(ReservedBlock, BijectiveAndDisjointFromOwnTokens) {
  for (int n = 1; n <= 5; ++n) {
    const GroupConfig c = cfg(n, 6, Mode::kGroupLockstep, 3, 2);
    for (int viewer = 1; viewer <= n; ++viewer) {
      std::set<int> seen;
      for (int m = 1; m <= n; ++m) {
        if (m == viewer) continue;
        for (int j = 1; j <= 6; ++j) {
          const int p = reserved_position_local(c, viewer, m, j);
          EXPECT_GT(p, 5);
          EXPECT_LE(p, 5 + 6 * (n - 1));
          EXPECT_TRUE(seen.insert(p).second);
        }
      }
      for (int k = 1; k <= 6; ++k) EXPECT_FALSE(seen.contains(assign_position_local(c, viewer, k)));
    }
  }
}

TEST(ReservedBlock, AscendingOtherAgentThenStep) {
  const GroupConfig c = cfg(3, 4, Mode::kGroupLockstep);
  EXPECT_EQ(reserved_position_local(c, 2, 1, 1), 1);
  EXPECT_EQ(reserved_position_local(c, 2, 1, 4), 4);
  EXPECT_EQ(reserved_position_local(c, 2, 3, 1), 5);
  EXPECT_EQ(reserved_position_local(c, 1, 2, 1), 1);
  EXPECT_THROW(reserved_position_local(c, 2, 2, 1), ValidationError);
}

TEST(AssignSlots, WorkedExamplePositions) {
  auto slots = assign_slots_interleaved(cfg(2, 50, Mode::kGroupInterleaved, 100, 10));
  ASSERT_EQ(slots.size(), 2u);
  EXPECT_EQ(slots[0].first_output(), 111);
  EXPECT_EQ(slots[0].first_output() + 49, 160);
  EXPECT_EQ(slots[1].first_output(), 171);
  EXPECT_EQ(slots[1].first_output() + 49, 220);
}

TEST(AssignSlots, SingleAgentContiguous) {
  auto slots = assign_slots_interleaved(cfg(1, 5, Mode::kGroupInterleaved, 3, 0));
  ASSERT_EQ(slots.size(), 1u);
  EXPECT_EQ(slots[0].first_output(), 4);
  EXPECT_EQ(slots[0].first_output() + slots[0].length - 1, 8);
}

TEST(AssignSlots, StartFormula) {
  auto slots = assign_slots_interleaved(cfg(3, 4, Mode::kGroupInterleaved, 2, 1));
  ASSERT_EQ(slots.size(), 3u);
  EXPECT_EQ(slots[0].first_position, 3);
  EXPECT_EQ(slots[1].first_position, 8);
  EXPECT_EQ(slots[2].first_position, 13);
  for (const AgentSlot& s : slots) EXPECT_EQ(s.length, 5);
}

TEST(OwnPosition, SlotLayoutMatchesSlots) {
  const GroupConfig c = cfg(3, 4, Mode::kGroupInterleaved, 2, 2);
  auto slots = assign_slots_interleaved(c);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_EQ(own_position(c, TC::header(n, 0)), slots[n - 1].first_position);
    for (int k = 1; k <= 4; ++k) {
      EXPECT_EQ(own_position(c, TC::thought(n, k)), slots[n - 1].first_output() + k - 1);
    }
  }
  EXPECT_EQ(own_position(c, TC::prompt(0)), 1);
}

TEST(InputCoordinate, FallsBackThroughHeaderAndPrompt) {
  EXPECT_EQ(input_coordinate(cfg(2, 3, Mode::kGroupInterleaved, 2, 2), TC::thought(2, 3)),
            TC::thought(2, 2));
  EXPECT_EQ(input_coordinate(cfg(2, 3, Mode::kGroupInterleaved, 2, 2), TC::thought(2, 1)),
            TC::header(2, 1));
  EXPECT_EQ(input_coordinate(cfg(2, 3, Mode::kGroupInterleaved, 2, 0), TC::thought(2, 1)),
            TC::prompt(1));
  EXPECT_FALSE(input_coordinate(cfg(2, 3, Mode::kGroupInterleaved), TC::thought(1, 1)));
}

TEST(GenerationOrder, InterleavedTwoByTwo) {
  auto order = generation_order(cfg(2, 2, Mode::kGroupInterleaved, 4, 2));
  const std::vector<GenerationEvent> want{
      {Kind::kPrefillPrompt, 0, {}},
      {Kind::kPrefillHeader, 1, {}},
      {Kind::kGenerate, 1, {TC::thought(1, 1)}},
      {Kind::kPrefillHeader, 2, {}},
      {Kind::kGenerate, 2, {TC::thought(2, 1)}},
      {Kind::kGenerate, 1, {TC::thought(1, 2)}},
      {Kind::kGenerate, 2, {TC::thought(2, 2)}},
  };
  EXPECT_EQ(order, want);
}

TEST(GenerationOrder, SingleAgentIsSequential) {
  auto order = generation_order(cfg(1, 3, Mode::kSingleChain));
  ASSERT_EQ(order.size(), 5u);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_EQ(order[k + 1].tokens, std::vector<TC>{TC::thought(1, k)});
  }
}

TEST(GenerationOrder, LockstepIsOneSetPerStep) {
  auto order = generation_order(cfg(3, 1, Mode::kGroupLockstep));
  ASSERT_EQ(order.back().kind, Kind::kGenerate);
  EXPECT_EQ(order.back().tokens,
            (std::vector<TC>{TC::thought(1, 1), TC::thought(2, 1), TC::thought(3, 1)}));
  EXPECT_EQ(std::count_if(order.begin(), order.end(),
                          [](const auto& e) { return e.kind == Kind::kGenerate; }),
            1);
}

TEST(Timeline, InterleavedFollowsGenerationOrder) {
  auto tl = timeline(cfg(2, 2, Mode::kGroupInterleaved, 1, 1), 2);
  const std::vector<TC> want{TC::prompt(0),     TC::header(1, 0),  TC::thought(1, 1),
                             TC::header(2, 0),  TC::thought(2, 1), TC::thought(1, 2),
                             TC::thought(2, 2)};
  EXPECT_EQ(tl, want);
}

TEST(Timeline, PerAgentLengthsDropFinishedAgents) {
  const std::vector<int> len{1, 3};
  auto tl = timeline(cfg(2, 3, Mode::kGroupLockstep), 3, len);
  const std::vector<TC> want{TC::thought(1, 1), TC::thought(2, 1), TC::thought(2, 2),
                             TC::thought(2, 3)};
  EXPECT_EQ(tl, want);
}

TEST(VisibilityOracle, LockstepSeesOthersThroughSameStep) {
  const GroupConfig c = cfg(2, 4, Mode::kGroupLockstep, 2, 1);
  auto got = visibility_oracle(c, TC::thought(2, 3));
  std::vector<TC> want{TC::prompt(0), TC::prompt(1), TC::header(1, 0), TC::header(2, 0)};
  for (int j = 1; j <= 3; ++j) {
    want.push_back(TC::thought(1, j));
    want.push_back(TC::thought(2, j));
  }
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
}

TEST(VisibilityOracle, IndependentSeesOnlyOwnChain) {
  const GroupConfig c = cfg(2, 4, Mode::kIndependent, 2, 1);
  auto got = visibility_oracle(c, TC::thought(2, 3));
  std::vector<TC> want{TC::prompt(0), TC::prompt(1), TC::header(2, 0), TC::thought(2, 1),
                       TC::thought(2, 2), TC::thought(2, 3)};
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
}

TEST(VisibilityOracle, InterleavedSecondAgentSeesFirstAgentsFirstToken) {
  // Generating (2,1) happens at the last token of agent 2's header.
  const GroupConfig c = cfg(2, 4, Mode::kGroupInterleaved, 3, 2);
  auto got = visibility_oracle(c, TC::header(2, 1));
  EXPECT_TRUE(std::binary_search(got.begin(), got.end(), TC::thought(1, 1)));
  auto lock = visibility_oracle(cfg(2, 4, Mode::kGroupLockstep, 3, 2), TC::header(2, 1));
  EXPECT_FALSE(std::binary_search(lock.begin(), lock.end(), TC::thought(1, 1)));
  // Agent 1 never sees agent 2's same-step token.
  auto first = visibility_oracle(c, TC::thought(1, 1));
  EXPECT_FALSE(std::binary_search(first.begin(), first.end(), TC::thought(2, 2)));
  EXPECT_TRUE(std::binary_search(first.begin(), first.end(), TC::thought(2, 1)));
}

TEST(VisibilityOracle, HeaderPrefixSeesPromptAndOwnPrefix) {
  const GroupConfig c = cfg(2, 2, Mode::kGroupLockstep, 2, 3);
  auto got = visibility_oracle(c, TC::header(2, 1));
  const std::vector<TC> want{TC::prompt(0), TC::prompt(1), TC::header(2, 0), TC::header(2, 1)};
  EXPECT_EQ(got, want);
}

TEST(VisibilityOracle, RejectsCoordinateOutsideTimeline) {
  const GroupConfig c = cfg(2, 2, Mode::kGroupLockstep);
  EXPECT_THROW(visibility_oracle(c, TC::thought(3, 1)), ValidationError);
  EXPECT_THROW(visibility_oracle(c, TC::thought(1, 2), 1), ValidationError);
}

TEST(VisibilityOracle, MonotoneAlongOwnChain) {
  for (Mode mode : {Mode::kGroupLockstep, Mode::kGroupInterleaved, Mode::kIndependent}) {
    const GroupConfig c = cfg(3, 6, mode, 2, 1);
    const auto tl = timeline(c, 6);
    for (int n = 1; n <= 3; ++n) {
      for (int k = 1; k < 6; ++k) {
        auto now = visibility_oracle(c, TC::thought(n, k));
        auto next = visibility_oracle(c, TC::thought(n, k + 1));
        EXPECT_TRUE(std::includes(next.begin(), next.end(), now.begin(), now.end()))
            << mode_name(mode) << " agent " << n << " step " << k;
      }
    }
  }
}

}  // namespace
}  // namespace cothink::sched
