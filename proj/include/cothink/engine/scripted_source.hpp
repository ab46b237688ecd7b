// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cothink/engine/token_source.hpp"

namespace cothink::engine {

// Read-only view a script gets for one step. Reading a coordinate outside
// the view throws ValidationError: scripts cannot peek at tokens the mode
// hides from them.
class ScriptView {
 public:
  ScriptView(const ThinkRequest& request, const std::vector<std::string>* items);

  const TokenCoordinate& target() const { return request_->target; }
  bool contains(const TokenCoordinate& c) const;
  // True when `c` is visible and is an end-of-thought.
  bool ended(const TokenCoordinate& c) const;
  // Item text of a visible thought; throws when `c` is not visible.
  const std::string& item(const TokenCoordinate& c) const;
  // Every item visible in thoughts, own and others'.
  std::vector<std::string> visible_items() const;

 private:
  const ThinkRequest* request_;
  const std::vector<std::string>* items_;
};

// nullopt ends the agent's chain of thought.
using ScriptProgram = std::function<std::optional<std::string>(const ScriptView& view, int step)>;

// Emits items[step-1], then ends.
ScriptProgram fixed_program(std::vector<std::string> items);
// Emits the first pool item not yet visible anywhere in the view.
ScriptProgram avoid_visible_program(std::vector<std::string> pool);
// Repeats what `agent` emitted `lag` steps earlier.
ScriptProgram echo_program(int agent, int lag);

// Source whose agents run scripts over item-level tokens. Items are interned
// into a vocabulary on first use (id 0 is end-of-thought); each token's
// text is the item followed by a newline. The answer is the distinct union
// of items across chains, in agent order.
class ScriptedSource : public TokenSource {
 public:
  static constexpr TokenId kEndOfThought = 0;

  explicit ScriptedSource(std::vector<ScriptProgram> programs);

  // {"agents": [{"kind": "fixed", "items": [...]},
  //             {"kind": "avoid_visible", "pool": [...]},
  //             {"kind": "echo", "agent": 1, "lag": 0}]}
  static ScriptedSource from_json(const nlohmann::json& script);

  std::string name() const override { return "scripted"; }
  void begin(const sched::GroupConfig& cfg, const SessionPrompt& prompt) override;
  std::vector<Emission> generate(std::span<const ThinkRequest> batch, Sampler& sampler) override;
  std::vector<Emission> answer(const AnswerRequest& request, Sampler& sampler) override;

  const std::vector<std::string>& vocabulary() const { return items_; }

 private:
  TokenId intern(const std::string& item);

  std::vector<ScriptProgram> programs_;
  std::vector<std::string> items_;  // id -> item, items_[0] unused
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace cothink::engine
