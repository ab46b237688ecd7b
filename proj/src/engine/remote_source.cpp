// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/engine/remote_source.hpp"

#include <map>

#include "cothink/errors.hpp"

namespace cothink::engine {

std::string fill_template(std::string text, const std::string& key, const std::string& value) {
  const std::string needle = "{" + key + "}";
  for (std::size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + value.size())) {
    text.replace(at, needle.size(), value);
  }
  return text;
}

void RemoteSourceConfig::validate() const {
  if (chunk < 1) throw ValidationError("remote source: chunk must be >= 1");
}

RemoteSource::RemoteSource(remote::CompletionClient& client, RemoteSourceConfig config)
    : client_(&client), config_(std::move(config)) {
  config_.validate();
}

void RemoteSource::begin(const sched::GroupConfig& cfg, const SessionPrompt& prompt) {
  prompt_ = prompt;
  agents_.assign(cfg.n_agents, AgentState{});
  requests_ = 0;
}

std::string RemoteSource::context_for(const ThinkRequest& request) const {
  const int self = request.target.agent;
  std::map<int, std::string> chains;
  for (const ViewEntry& v : request.view) {
    if (v.coord.role == Role::kThought) chains[v.coord.agent] += v.text;
  }
  std::string out = fill_template(config_.instruction_template, "QUESTION", prompt_.prompt_text);
  out = fill_template(std::move(out), "ThinkerID", std::to_string(self));
  for (const auto& [agent, text] : chains) {
    if (agent == self || text.empty()) continue;
    out += "\n\n" + prompt_.header_texts.at(agent - 1) + text;
  }
  out += "\n\n" + prompt_.header_texts.at(self - 1) + chains[self];
  return out;
}

std::vector<Emission> RemoteSource::generate(std::span<const ThinkRequest> batch,
                                             Sampler& sampler) {
  std::vector<Emission> out;
  for (const ThinkRequest& req : batch) {
    AgentState& st = agents_.at(req.target.agent - 1);
    if (st.pending.empty() && !st.finished) {
      remote::CompletionRequest call;
      call.prompt = context_for(req);
      call.max_tokens = config_.chunk;
      call.temperature = sampler.config().temperature;
      call.seed = Sampler::stream_seed(sampler.config().seed, req.target.agent) + req.target.step;
      const remote::Completion c = client_->complete(call);
      ++requests_;
      st.pending.assign(c.tokens.begin(), c.tokens.end());
      st.finished = c.finish_reason == "stop" ||
                    static_cast<int>(c.tokens.size()) < config_.chunk;
    }
    if (st.pending.empty()) {
      out.push_back({kRemoteToken, "", true});
      continue;
    }
    out.push_back({kRemoteToken, st.pending.front(), false});
    st.pending.pop_front();
  }
  return out;
}

std::vector<Emission> RemoteSource::answer(const AnswerRequest& request, Sampler& sampler) {
  const SessionPrompt& p = *request.prompt;
  std::string ctx = p.prompt_text;
  for (const AgentChain& chain : request.chains) {
    ctx += "\n\n" + p.header_texts.at(chain.agent - 1) + chain.text;
  }
  ctx += "\n\n" + p.answer_header_text;
  remote::CompletionRequest call;
  call.prompt = std::move(ctx);
  call.max_tokens = request.budget;
  call.temperature = sampler.config().temperature;
  call.seed = Sampler::stream_seed(sampler.config().seed, 0);
  const remote::Completion c = client_->complete(call);
  ++requests_;
  std::vector<Emission> out;
  for (const std::string& t : c.tokens) {
    if (static_cast<int>(out.size()) >= request.budget) break;
    out.push_back({kRemoteToken, t, false});
  }
  return out;
}

}  // namespace cothink::engine
