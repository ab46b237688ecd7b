// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/engine/scripted_source.hpp"

#include <algorithm>
#include <set>

#include "cothink/errors.hpp"

namespace cothink::engine {

ScriptView::ScriptView(const ThinkRequest& request, const std::vector<std::string>* items)
    : request_(&request), items_(items) {}

bool ScriptView::contains(const TokenCoordinate& c) const {
  return std::any_of(request_->view.begin(), request_->view.end(),
                     [&](const ViewEntry& v) { return v.coord == c; });
}

bool ScriptView::ended(const TokenCoordinate& c) const {
  return std::any_of(request_->view.begin(), request_->view.end(), [&](const ViewEntry& v) {
    return v.coord == c && v.token == ScriptedSource::kEndOfThought;
  });
}

const std::string& ScriptView::item(const TokenCoordinate& c) const {
  for (const ViewEntry& v : request_->view) {
    if (v.coord != c) continue;
    if (c.role != Role::kThought || v.token <= 0 ||
        static_cast<std::size_t>(v.token) >= items_->size()) {
      throw ValidationError("script: " + to_string(c) + " carries no item");
    }
    return (*items_)[v.token];
  }
  throw ValidationError("script for " + to_string(request_->target) + " read " + to_string(c) +
                        ", which is not visible to it");
}

std::vector<std::string> ScriptView::visible_items() const {
  std::vector<std::string> out;
  for (const ViewEntry& v : request_->view) {
    if (v.coord.role == Role::kThought && v.token > 0 &&
        static_cast<std::size_t>(v.token) < items_->size()) {
      out.push_back((*items_)[v.token]);
    }
  }
  return out;
}

ScriptProgram fixed_program(std::vector<std::string> items) {
  return [items = std::move(items)](const ScriptView&, int step) -> std::optional<std::string> {
    if (step < 1 || static_cast<std::size_t>(step) > items.size()) return std::nullopt;
    return items[step - 1];
  };
}

ScriptProgram avoid_visible_program(std::vector<std::string> pool) {
  return [pool = std::move(pool)](const ScriptView& view, int) -> std::optional<std::string> {
    const auto seen = view.visible_items();
    const std::set<std::string> taken(seen.begin(), seen.end());
    for (const std::string& s : pool) {
      if (!taken.contains(s)) return s;
    }
    return std::nullopt;
  };
}

ScriptProgram echo_program(int agent, int lag) {
  return [agent, lag](const ScriptView& view, int step) -> std::optional<std::string> {
    const int source_step = step - lag;
    if (source_step < 1) return std::nullopt;
    const TokenCoordinate source = TokenCoordinate::thought(agent, source_step);
    if (view.ended(source)) return std::nullopt;
    return view.item(source);
  };
}

ScriptedSource::ScriptedSource(std::vector<ScriptProgram> programs)
    : programs_(std::move(programs)), items_{""} {}

ScriptedSource ScriptedSource::from_json(const nlohmann::json& script) {
  if (!script.contains("agents") || !script["agents"].is_array()) {
    throw ValidationError("script: expected an \"agents\" array");
  }
  std::vector<ScriptProgram> programs;
  for (const auto& a : script["agents"]) {
    const std::string kind = a.value("kind", "");
    if (kind == "fixed") {
      programs.push_back(fixed_program(a.at("items").get<std::vector<std::string>>()));
    } else if (kind == "avoid_visible") {
      programs.push_back(avoid_visible_program(a.at("pool").get<std::vector<std::string>>()));
    } else if (kind == "echo") {
      programs.push_back(echo_program(a.at("agent").get<int>(), a.value("lag", 0)));
    } else {
      throw ValidationError("script: unknown program kind '" + kind + "'");
    }
  }
  return ScriptedSource(std::move(programs));
}

TokenId ScriptedSource::intern(const std::string& item) {
  auto [it, fresh] = ids_.emplace(item, static_cast<TokenId>(items_.size()));
  if (fresh) items_.push_back(item);
  return it->second;
}

void ScriptedSource::begin(const sched::GroupConfig& cfg, const SessionPrompt&) {
  if (static_cast<int>(programs_.size()) < cfg.n_agents) {
    throw ValidationError("scripted source: " + std::to_string(programs_.size()) +
                          " scripts for " + std::to_string(cfg.n_agents) + " agents");
  }
}

std::vector<Emission> ScriptedSource::generate(std::span<const ThinkRequest> batch, Sampler&) {
  std::vector<Emission> out;
  for (const ThinkRequest& req : batch) {
    const ScriptView view(req, &items_);
    const auto item = programs_.at(req.target.agent - 1)(view, req.target.step);
    if (!item) {
      out.push_back({kEndOfThought, "", true});
    } else {
      out.push_back({intern(*item), *item + "\n", false});
    }
  }
  return out;
}

std::vector<Emission> ScriptedSource::answer(const AnswerRequest& request, Sampler&) {
  std::vector<Emission> out;
  std::set<TokenId> seen;
  for (const AgentChain& chain : request.chains) {
    for (TokenId t : chain.tokens) {
      if (static_cast<int>(out.size()) >= request.budget) return out;
      if (t <= 0 || !seen.insert(t).second) continue;
      out.push_back({t, items_.at(t) + "\n", false});
    }
  }
  return out;
}

}  // namespace cothink::engine
