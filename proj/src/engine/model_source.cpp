// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/engine/model_source.hpp"

#include <stdexcept>

#include "cothink/engine/tokenizer.hpp"
#include "cothink/errors.hpp"
#include "cothink/sched/layout.hpp"
#include "cothink/sched/schedule.hpp"

namespace cothink::engine {

using model::KVCache;
using model::Logits;
using model::NewToken;
using sched::EntryKind;
using sched::LayoutEntry;

ModelSource::ModelSource(const model::Model& model) : model_(&model) {}

std::uint64_t ModelSource::checksum() const { return model_->checksum(); }

void ModelSource::begin(const sched::GroupConfig& cfg, const SessionPrompt& prompt) {
  if (cfg.prompt_len + cfg.agent_prompt_len < 1) {
    throw ValidationError("toy source: the prompt and agent prompt cannot both be empty");
  }
  cfg_ = cfg;
  tokens_.clear();
  for (int i = 0; i < prompt.prompt_len(); ++i) {
    tokens_[TokenCoordinate::prompt(i)] = prompt.prompt[i];
  }
  for (int n = 1; n <= static_cast<int>(prompt.headers.size()); ++n) {
    for (int i = 0; i < prompt.header_len(); ++i) {
      tokens_[TokenCoordinate::header(n, i)] = prompt.headers[n - 1][i];
    }
  }
  const int sequences = sched::uses_agent_batch_layout(cfg.mode) ? cfg.n_agents : 1;
  caches_.assign(sequences, KVCache(model_->config().num_layers, model_->width()));
}

Logits ModelSource::insert(std::size_t seq, int owner, const TokenCoordinate& coord) {
  KVCache& cache = caches_[seq];
  int position = sched::own_position(cfg_, coord);
  if (owner != 0 && coord.role == Role::kThought && coord.agent != owner) {
    position = sched::reserved_position_local(cfg_, owner, coord.agent, coord.step);
  }
  const LayoutEntry entry{coord, position, EntryKind::kContext, std::nullopt};
  std::vector<TokenCoordinate> visible;
  for (const model::CacheEntry& e : cache.entries()) {
    if (sched::row_includes(cfg_, owner, entry, {e.coord, e.position, EntryKind::kContext, {}})) {
      visible.push_back(e.coord);
    }
  }
  const NewToken tok{tokens_.at(coord), position, coord};
  return model::forward_incremental(*model_, cache, std::span(&tok, 1), std::span(&visible, 1));
}

std::span<const float> ModelSource::generate_local(const ThinkRequest& req) {
  const int owner = req.target.agent;
  const std::size_t seq = static_cast<std::size_t>(owner - 1);
  const auto input = sched::input_coordinate(cfg_, req.target);
  if (!input) throw ValidationError("toy source: nothing to condition the first thought on");
  // Prompt, then other agents' tokens, then the owner's own, ending with the
  // input.
  auto group = [&](const TokenCoordinate& c) {
    if (c.role == Role::kPrompt) return 0;
    return c.agent == owner ? 2 : 1;
  };
  for (int pass = 0; pass < 3; ++pass) {
    for (const ViewEntry& v : req.view) {
      if (group(v.coord) != pass || v.coord == *input || caches_[seq].contains(v.coord)) continue;
      insert(seq, owner, v.coord);
    }
  }
  if (caches_[seq].contains(*input)) {
    throw std::logic_error("toy source: input " + to_string(*input) + " already cached");
  }
  scratch_ = insert(seq, owner, *input);
  return scratch_.row(0);
}

std::span<const float> ModelSource::generate_slot(const ThinkRequest& req) {
  KVCache& cache = caches_[0];
  for (const ViewEntry& v : req.view) {
    if (!cache.contains(v.coord)) insert(0, 0, v.coord);
  }
  const auto input = sched::input_coordinate(cfg_, req.target);
  if (!input) throw ValidationError("toy source: nothing to condition the first thought on");
  const LayoutEntry probe{*input, sched::own_position(cfg_, *input), EntryKind::kProbe,
                          req.target};
  std::vector<TokenCoordinate> visible;
  for (const model::CacheEntry& e : cache.entries()) {
    if (sched::row_includes(cfg_, 0, probe, {e.coord, e.position, EntryKind::kContext, {}})) {
      visible.push_back(e.coord);
    }
  }
  const NewToken tok{tokens_.at(*input), probe.position, *input};
  scratch_ = model::forward_probe(*model_, cache, tok, visible);
  return scratch_.row(0);
}

std::vector<Emission> ModelSource::generate(std::span<const ThinkRequest> batch,
                                            Sampler& sampler) {
  std::vector<Emission> out;
  const bool local = sched::uses_agent_batch_layout(cfg_.mode);
  for (const ThinkRequest& req : batch) {
    for (const ViewEntry& v : req.view) tokens_[v.coord] = v.token;
    std::span<const float> logits = local ? generate_local(req) : generate_slot(req);
    if (observer_) observer_(req.target, logits);
    const TokenId id = sampler.sample(logits, req.target.agent);
    out.push_back({id, ByteTokenizer::piece(id), id == ByteTokenizer::kEndOfThought});
    if (!local) {
      tokens_[req.target] = id;
      insert(0, 0, req.target);
    }
  }
  return out;
}

std::vector<TokenId> answer_context(const AnswerRequest& request) {
  const SessionPrompt& p = *request.prompt;
  std::vector<TokenId> ctx = p.prompt;
  for (const AgentChain& chain : request.chains) {
    const auto& header = p.headers.at(chain.agent - 1);
    ctx.insert(ctx.end(), header.begin(), header.end());
    ctx.insert(ctx.end(), chain.tokens.begin(), chain.tokens.end());
  }
  ctx.insert(ctx.end(), p.answer_header.begin(), p.answer_header.end());
  return ctx;
}

std::vector<Emission> ModelSource::answer(const AnswerRequest& request, Sampler& sampler) {
  std::vector<TokenId> ctx = answer_context(request);
  if (ctx.empty()) throw ValidationError("toy source: empty answer context");
  KVCache cache(model_->config().num_layers, model_->width());
  std::vector<TokenCoordinate> seen;
  Logits last;
  auto feed = [&](TokenId id) {
    const int i = static_cast<int>(cache.size());
    const NewToken tok{id, i + 1, {0, 0, Role::kAnswer, i}};
    last = model::forward_incremental(*model_, cache, std::span(&tok, 1), std::span(&seen, 1));
    seen.push_back(tok.coord);
  };
  for (TokenId id : ctx) feed(id);
  std::vector<Emission> out;
  for (int i = 0; i < request.budget; ++i) {
    const TokenId id = sampler.sample(last.row(0), 0);
    if (id == ByteTokenizer::kEndOfThought) break;
    out.push_back({id, ByteTokenizer::piece(id), false});
    if (i + 1 < request.budget) feed(id);
  }
  return out;
}

}  // namespace cothink::engine
