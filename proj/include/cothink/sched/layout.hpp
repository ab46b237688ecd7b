// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cothink/bit_matrix.hpp"
#include "cothink/coordinate.hpp"
#include "cothink/sched/group_config.hpp"

namespace cothink::sched {

// Square visibility matrix over a declared timeline. Row i lists what the
// token at timeline[i] attends to.
struct AttentionMask {
  std::vector<TokenCoordinate> timeline;
  std::vector<int> positions;
  BitMatrix bits;

  std::size_t size() const { return timeline.size(); }
  std::optional<std::size_t> index_of(const TokenCoordinate& c) const;
  // Coordinates permitted in row i, sorted ascending.
  std::vector<TokenCoordinate> visible(std::size_t row) const;
};

enum class EntryKind {
  kContext,  // written to the KV cache
  kProbe,    // evaluated for its logits only, never cached
};

struct LayoutEntry {
  TokenCoordinate coord;
  int position = 0;
  EntryKind kind = EntryKind::kContext;
  // For probes: the thought whose logits this evaluation produces.
  std::optional<TokenCoordinate> target;

  friend bool operator==(const LayoutEntry&, const LayoutEntry&) = default;
};

// One model input sequence in cache-insertion order with its realized mask.
// Row masks only reference earlier entries plus the row itself.
struct PhysicalSequence {
  int owner = 0;  // agent whose sequence this is; 0 for the shared sequence
  std::vector<LayoutEntry> entries;
  BitMatrix mask;
};

struct PhysicalLayout {
  GroupConfig config;
  std::vector<PhysicalSequence> sequences;
};

// Row rule shared by the layout simulation and the model-backed token
// source: whether `entry`, being inserted into the sequence of `owner` (0 for
// the shared slot-layout sequence), attends to the context entry `present`
// already in that sequence.
//   prompt token             earlier prompt tokens
//   agent-prompt token       prompt and its own header prefix; the last
//                            token of the sequence owner's header (every
//                            header in the slot layout) instead sees what
//                            that agent's first thought conditions on
//   other agent's thought    every present entry at a lower position
//   (local copy)
//   own thought (n,k)        local: the conditioning set of (n,k+1);
//                            slot: the conditioning set of (n,k)
//   probe for target t       the conditioning set of t, minus the cached
//                            copy of the probe's own coordinate
bool row_includes(const GroupConfig& cfg, int owner, const LayoutEntry& entry,
                  const LayoutEntry& present);

// Simulates how the mode's implementation fills its KV cache(s) up to
// `steps` thoughts per agent (K when negative; `lengths` overrides per
// agent). Agent-batch modes yield one sequence per agent, with other agents'
// thoughts copied into the reserved block and rows causal over filled
// positions (unfilled reserved positions stay holes). Interleaved mode
// yields one shared sequence whose insertion order interleaves agents, plus
// probe rows that evaluate each agent's input token with the view its next
// thought is entitled to.
PhysicalLayout build_physical_layout(const GroupConfig& cfg, int steps = -1,
                                     std::span<const int> lengths = {});

// Logical mask over timeline(cfg, steps): every row is read off the physical
// layout at the entry that generates that coordinate's successor.
AttentionMask project_mask(const PhysicalLayout& layout, int steps = -1,
                           std::span<const int> lengths = {});

// build_mask = project_mask(build_physical_layout(...)).
AttentionMask build_mask(const GroupConfig& cfg, int steps = -1,
                         std::span<const int> lengths = {});

// JSON debug dump: config, the logical timeline with positions and hex row
// bitsets, and every physical sequence likewise.
std::string dump_layout_json(const PhysicalLayout& layout, const AttentionMask& mask);

}  // namespace cothink::sched
