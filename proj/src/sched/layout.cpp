// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/sched/layout.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "cothink/errors.hpp"
#include "cothink/sched/schedule.hpp"

namespace cothink::sched {

std::optional<std::size_t> AttentionMask::index_of(const TokenCoordinate& c) const {
  auto it = std::find(timeline.begin(), timeline.end(), c);
  if (it == timeline.end()) return std::nullopt;
  return static_cast<std::size_t>(it - timeline.begin());
}

std::vector<TokenCoordinate> AttentionMask::visible(std::size_t row) const {
  std::vector<TokenCoordinate> out;
  for (std::size_t j = 0; j < size(); ++j) {
    if (bits.get(row, j)) out.push_back(timeline[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Grows one physical sequence; rows are collected as index lists and packed
// into a BitMatrix at the end.
class SequenceBuilder {
 public:
  explicit SequenceBuilder(int owner) { seq_.owner = owner; }

  // Appends an entry whose row holds every present context entry accepted
  // by `keep`, plus the new entry itself.
  template <typename Pred>
  void add(LayoutEntry entry, Pred keep) {
    std::vector<std::size_t> row;
    for (std::size_t i = 0; i < seq_.entries.size(); ++i) {
      const LayoutEntry& e = seq_.entries[i];
      if (e.kind == EntryKind::kContext && keep(e)) row.push_back(i);
    }
    row.push_back(seq_.entries.size());
    seq_.entries.push_back(std::move(entry));
    rows_.push_back(std::move(row));
  }

  PhysicalSequence finish() {
    seq_.mask = BitMatrix(seq_.entries.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (std::size_t c : rows_[r]) seq_.mask.set(r, c);
    }
    return std::move(seq_);
  }

 private:
  PhysicalSequence seq_;
  std::vector<std::vector<std::size_t>> rows_;
};

LayoutEntry context(const TokenCoordinate& c, int position) {
  return {c, position, EntryKind::kContext, std::nullopt};
}

void add_rule(const GroupConfig& cfg, SequenceBuilder& b, int owner, LayoutEntry entry) {
  const LayoutEntry& e = entry;
  b.add(entry, [&](const LayoutEntry& present) { return row_includes(cfg, owner, e, present); });
}

void add_prompt(const GroupConfig& cfg, SequenceBuilder& b, int owner) {
  for (int i = 0; i < cfg.prompt_len; ++i) {
    const TokenCoordinate c = TokenCoordinate::prompt(i);
    add_rule(cfg, b, owner, context(c, own_position(cfg, c)));
  }
}

void add_header(const GroupConfig& cfg, SequenceBuilder& b, int owner, int agent) {
  for (int i = 0; i < cfg.agent_prompt_len; ++i) {
    const TokenCoordinate c = TokenCoordinate::header(agent, i);
    add_rule(cfg, b, owner, context(c, own_position(cfg, c)));
  }
}

std::vector<int> resolve_lengths(const GroupConfig& cfg, int steps, std::span<const int> lengths) {
  if (steps < 0) steps = cfg.budget;
  if (steps > cfg.budget) throw ValidationError("layout: steps exceed the budget");
  std::vector<int> out(cfg.n_agents, steps);
  if (!lengths.empty()) {
    if (lengths.size() != static_cast<std::size_t>(cfg.n_agents)) {
      throw ValidationError("layout: one length per agent required");
    }
    for (int n = 0; n < cfg.n_agents; ++n) out[n] = std::clamp(lengths[n], 0, steps);
  }
  return out;
}

PhysicalSequence build_local_sequence(const GroupConfig& cfg, int owner,
                                      const std::vector<int>& len) {
  SequenceBuilder b(owner);
  add_prompt(cfg, b, owner);
  const bool group = is_group_mode(cfg.mode);
  if (group) {
    for (int m = 1; m <= cfg.n_agents; ++m) {
      if (m != owner) add_header(cfg, b, owner, m);
    }
  }
  add_header(cfg, b, owner, owner);
  for (int k = 1; k <= len[owner - 1]; ++k) {
    if (group) {
      for (int m = 1; m <= cfg.n_agents; ++m) {
        if (m == owner || len[m - 1] < k) continue;
        add_rule(cfg, b, owner,
                 context(TokenCoordinate::thought(m, k), reserved_position_local(cfg, owner, m, k)));
      }
    }
    const TokenCoordinate c = TokenCoordinate::thought(owner, k);
    add_rule(cfg, b, owner, context(c, own_position(cfg, c)));
  }
  return b.finish();
}

PhysicalSequence build_slot_sequence(const GroupConfig& cfg, const std::vector<int>& len) {
  SequenceBuilder b(0);
  add_prompt(cfg, b, 0);
  const int last_step = *std::max_element(len.begin(), len.end()) + 1;
  for (int k = 1; k <= last_step; ++k) {
    for (int n = 1; n <= cfg.n_agents; ++n) {
      if (k == 1) add_header(cfg, b, 0, n);
      const int have = len[n - 1];
      if (have < k - 1) continue;
      const TokenCoordinate target = TokenCoordinate::thought(n, k);
      if (auto input = input_coordinate(cfg, target)) {
        add_rule(cfg, b, 0, {*input, own_position(cfg, *input), EntryKind::kProbe, target});
      }
      if (have >= k) add_rule(cfg, b, 0, context(target, own_position(cfg, target)));
    }
  }
  return b.finish();
}

// The coordinate whose generation a row of `c` drives, if any.
std::optional<TokenCoordinate> successor(const GroupConfig& cfg, const TokenCoordinate& c) {
  if (c.role == Role::kThought) return TokenCoordinate::thought(c.agent, c.step + 1);
  if (c.role == Role::kAgentPrompt && c.offset + 1 == cfg.agent_prompt_len) {
    return TokenCoordinate::thought(c.agent, 1);
  }
  return std::nullopt;
}

}  // namespace

bool row_includes(const GroupConfig& cfg, int owner, const LayoutEntry& entry,
                  const LayoutEntry& present) {
  if (present.kind != EntryKind::kContext) return false;
  const TokenCoordinate& c = entry.coord;
  const TokenCoordinate& p = present.coord;
  if (entry.kind == EntryKind::kProbe) {
    return p != c && conditions_on(cfg, *entry.target, p);
  }
  switch (c.role) {
    case Role::kPrompt:
      return p.role == Role::kPrompt && p.offset < c.offset;
    case Role::kAgentPrompt:
      if (c.offset + 1 == cfg.agent_prompt_len && (owner == 0 || owner == c.agent)) {
        return conditions_on(cfg, TokenCoordinate::thought(c.agent, 1), p);
      }
      return p.role == Role::kPrompt ||
             (p.role == Role::kAgentPrompt && p.agent == c.agent && p.offset < c.offset);
    case Role::kThought:
      if (owner != 0 && c.agent != owner) return present.position < entry.position;
      if (owner == 0) return conditions_on(cfg, c, p);
      return conditions_on(cfg, TokenCoordinate::thought(c.agent, c.step + 1), p);
    case Role::kAnswer:
      break;
  }
  return false;
}

PhysicalLayout build_physical_layout(const GroupConfig& cfg, int steps,
                                     std::span<const int> lengths) {
  cfg.validate();
  const std::vector<int> len = resolve_lengths(cfg, steps, lengths);
  PhysicalLayout layout{cfg, {}};
  if (uses_agent_batch_layout(cfg.mode)) {
    for (int n = 1; n <= cfg.n_agents; ++n) {
      layout.sequences.push_back(build_local_sequence(cfg, n, len));
    }
  } else {
    layout.sequences.push_back(build_slot_sequence(cfg, len));
  }
  return layout;
}

AttentionMask project_mask(const PhysicalLayout& layout, int steps, std::span<const int> lengths) {
  const GroupConfig& cfg = layout.config;
  AttentionMask mask;
  mask.timeline = timeline(cfg, steps, lengths);
  const std::size_t n = mask.timeline.size();
  mask.bits = BitMatrix(n);
  std::unordered_map<TokenCoordinate, std::size_t, TokenCoordinateHash> index;
  for (std::size_t i = 0; i < n; ++i) {
    index.emplace(mask.timeline[i], i);
    mask.positions.push_back(own_position(cfg, mask.timeline[i]));
  }

  const bool local = uses_agent_batch_layout(cfg.mode);
  for (std::size_t row = 0; row < n; ++row) {
    const TokenCoordinate& c = mask.timeline[row];
    const PhysicalSequence* seq = nullptr;
    std::optional<std::size_t> at;
    if (local) {
      const int owner = c.role == Role::kPrompt ? 1 : c.agent;
      seq = &layout.sequences.at(owner - 1);
    } else {
      seq = &layout.sequences.at(0);
      if (auto next = successor(cfg, c)) {
        for (std::size_t i = 0; i < seq->entries.size(); ++i) {
          const LayoutEntry& e = seq->entries[i];
          if (e.kind == EntryKind::kProbe && e.target == next) {
            at = i;
            break;
          }
        }
      }
    }
    if (!at) {
      for (std::size_t i = 0; i < seq->entries.size(); ++i) {
        const LayoutEntry& e = seq->entries[i];
        if (e.kind == EntryKind::kContext && e.coord == c) {
          at = i;
          break;
        }
      }
    }
    if (!at) throw std::logic_error("project_mask: no physical row for " + to_string(c));
    for (std::size_t col = 0; col < seq->entries.size(); ++col) {
      if (!seq->mask.get(*at, col)) continue;
      auto it = index.find(seq->entries[col].coord);
      if (it == index.end()) {
        throw std::logic_error("project_mask: row " + to_string(c) + " sees " +
                               to_string(seq->entries[col].coord) + " outside the timeline");
      }
      mask.bits.set(row, it->second);
    }
  }
  return mask;
}

AttentionMask build_mask(const GroupConfig& cfg, int steps, std::span<const int> lengths) {
  return project_mask(build_physical_layout(cfg, steps, lengths), steps, lengths);
}

namespace {

nlohmann::json coord_json(const TokenCoordinate& c) {
  return {{"agent", c.agent},
          {"step", c.step},
          {"role", std::string(role_name(c.role))},
          {"offset", c.offset}};
}

}  // namespace

std::string dump_layout_json(const PhysicalLayout& layout, const AttentionMask& mask) {
  const GroupConfig& cfg = layout.config;
  nlohmann::json out;
  out["config"] = {{"n_agents", cfg.n_agents},
                   {"budget", cfg.budget},
                   {"mode", std::string(mode_name(cfg.mode))},
                   {"prompt_len", cfg.prompt_len},
                   {"agent_prompt_len", cfg.agent_prompt_len}};
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    rows.push_back({{"coord", coord_json(mask.timeline[i])},
                    {"label", to_string(mask.timeline[i])},
                    {"position", mask.positions[i]},
                    {"row", mask.bits.row_hex(i)}});
  }
  out["mask"] = std::move(rows);
  nlohmann::json seqs = nlohmann::json::array();
  for (const PhysicalSequence& s : layout.sequences) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      const LayoutEntry& e = s.entries[i];
      nlohmann::json j = {{"coord", coord_json(e.coord)},
                          {"label", to_string(e.coord)},
                          {"position", e.position},
                          {"kind", e.kind == EntryKind::kProbe ? "probe" : "context"},
                          {"row", s.mask.row_hex(i)}};
      if (e.target) j["target"] = to_string(*e.target);
      entries.push_back(std::move(j));
    }
    seqs.push_back({{"owner", s.owner}, {"entries", std::move(entries)}});
  }
  out["sequences"] = std::move(seqs);
  return out.dump(2);
}

}  // namespace cothink::sched
