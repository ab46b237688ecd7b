// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/engine/decode.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cothink/config_json.hpp"
#include "cothink/engine/tokenizer.hpp"
#include "cothink/errors.hpp"
#include "cothink/sched/schedule.hpp"

namespace cothink::engine {

using nlohmann::json;

namespace {

std::string expand(std::string_view tmpl, const std::string& id) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl.compare(i, 3, "{n}") == 0) {
      out += id;
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

}  // namespace

SessionPrompt make_session_prompt(std::string_view prompt_text, std::string_view header_template,
                                  int n_agents, std::string_view answer_header) {
  if (n_agents < 1) throw ValidationError("session prompt: n_agents must be >= 1");
  SessionPrompt p;
  p.prompt_text = prompt_text;
  p.prompt = ByteTokenizer::encode(prompt_text);
  const int width = static_cast<int>(std::to_string(n_agents).size());
  for (int n = 1; n <= n_agents; ++n) {
    std::string id = std::to_string(n);
    id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
    p.header_texts.push_back(expand(header_template, id));
    p.headers.push_back(ByteTokenizer::encode(p.header_texts.back()));
  }
  p.answer_header_text = answer_header;
  p.answer_header = ByteTokenizer::encode(answer_header);
  return p;
}

// ---------------------------------------------------------------------------
// Transcript accessors

std::vector<int> Transcript::lengths() const {
  std::vector<int> out(config.n_agents, 0);
  for (const ThinkEvent& e : events) {
    out.at(e.coord.agent - 1) = std::max(out.at(e.coord.agent - 1), e.coord.step);
  }
  return out;
}

int Transcript::latency() const {
  const auto len = lengths();
  return len.empty() ? 0 : *std::max_element(len.begin(), len.end());
}

std::string Transcript::chain_text(int agent, int max_step) const {
  std::string out;
  for (const ThinkEvent& e : events) {
    if (e.coord.agent != agent || e.end_of_thought) continue;
    if (max_step >= 0 && e.coord.step > max_step) continue;
    out += e.text;
  }
  return out;
}

std::vector<AgentChain> Transcript::chains(int max_step) const {
  std::vector<AgentChain> out;
  for (int n = 1; n <= config.n_agents; ++n) {
    AgentChain c{n, {}, {}};
    for (const ThinkEvent& e : events) {
      if (e.coord.agent != n || e.end_of_thought) continue;
      if (max_step >= 0 && e.coord.step > max_step) continue;
      c.tokens.push_back(e.token);
      c.text += e.text;
    }
    if (!c.tokens.empty()) out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phases

Transcript run_think_phase(const sched::GroupConfig& cfg, TokenSource& source,
                           const SessionPrompt& prompt, Sampler& sampler) {
  cfg.validate();
  if (prompt.prompt_len() != cfg.prompt_len) {
    throw ValidationError("think phase: prompt has " + std::to_string(prompt.prompt_len()) +
                          " tokens, config declares " + std::to_string(cfg.prompt_len));
  }
  if (static_cast<int>(prompt.headers.size()) != cfg.n_agents) {
    throw ValidationError("think phase: one agent prompt per agent required");
  }
  for (const auto& h : prompt.headers) {
    if (static_cast<int>(h.size()) != cfg.agent_prompt_len) {
      throw ValidationError("think phase: agent prompt length " + std::to_string(h.size()) +
                            " differs from the configured " +
                            std::to_string(cfg.agent_prompt_len));
    }
  }

  Transcript t;
  t.config = cfg;
  t.sampler = sampler.config();
  t.source = source.name();
  t.model_checksum = source.checksum();
  t.prompt = prompt;

  source.begin(cfg, prompt);
  std::vector<ViewEntry> present;  // generation order
  std::vector<bool> frozen(cfg.n_agents, false);
  using Kind = sched::GenerationEvent::Kind;
  for (const sched::GenerationEvent& ev : sched::generation_order(cfg)) {
    if (ev.kind == Kind::kPrefillPrompt) {
      for (int i = 0; i < cfg.prompt_len; ++i) {
        present.push_back({TokenCoordinate::prompt(i), prompt.prompt[i],
                           ByteTokenizer::piece(prompt.prompt[i])});
      }
      continue;
    }
    if (ev.kind == Kind::kPrefillHeader) {
      const auto& h = prompt.headers[ev.agent - 1];
      for (int i = 0; i < cfg.agent_prompt_len; ++i) {
        present.push_back({TokenCoordinate::header(ev.agent, i), h[i], ByteTokenizer::piece(h[i])});
      }
      continue;
    }
    std::vector<ThinkRequest> batch;
    for (const TokenCoordinate& target : ev.tokens) {
      if (frozen[target.agent - 1]) continue;
      ThinkRequest req{target, sched::own_position(cfg, target), {}};
      for (const ViewEntry& v : present) {
        if (sched::conditions_on(cfg, target, v.coord)) req.view.push_back(v);
      }
      batch.push_back(std::move(req));
    }
    if (batch.empty()) continue;
    std::vector<Emission> out = source.generate(batch, sampler);
    if (out.size() != batch.size()) {
      throw RuntimeFailure("source '" + source.name() + "' returned " +
                           std::to_string(out.size()) + " tokens for " +
                           std::to_string(batch.size()) + " requests");
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const TokenCoordinate& c = batch[i].target;
      t.events.push_back({c, batch[i].position, out[i].token, out[i].text, out[i].end_of_thought});
      present.push_back({c, out[i].token, out[i].text});
      if (out[i].end_of_thought) frozen[c.agent - 1] = true;
    }
  }
  return t;
}

void run_answer_phase(Transcript& transcript, TokenSource& source, Sampler& sampler,
                      int answer_budget) {
  if (answer_budget < 0) throw ValidationError("answer phase: budget must be >= 0");
  AnswerRequest req{&transcript.prompt, transcript.chains(), answer_budget};
  transcript.answer.clear();
  transcript.answer_text.clear();
  if (answer_budget == 0) return;
  for (const Emission& e : source.answer(req, sampler)) {
    transcript.answer.push_back(e.token);
    transcript.answer_text += e.text;
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json text_tokens(const std::string& text, const std::vector<TokenId>& tokens) {
  return {{"text", text}, {"tokens", tokens}};
}

}  // namespace

std::string transcript_to_jsonl(const Transcript& t) {
  std::ostringstream out;
  write_transcript(out, t);
  return out.str();
}

void write_transcript(std::ostream& out, const Transcript& t) {
  json header = {{"type", "header"},
                 {"format", "cothink-transcript"},
                 {"version", 1},
                 {"config", t.config},
                 {"sampler", t.sampler},
                 {"source", t.source},
                 {"model_checksum", hex64(t.model_checksum)}};
  if (t.created) header["created"] = *t.created;
  header["prompt"] = text_tokens(t.prompt.prompt_text, t.prompt.prompt);
  json agents = json::array();
  for (std::size_t n = 0; n < t.prompt.headers.size(); ++n) {
    agents.push_back(text_tokens(t.prompt.header_texts.at(n), t.prompt.headers[n]));
  }
  header["agent_prompts"] = std::move(agents);
  header["answer_header"] = text_tokens(t.prompt.answer_header_text, t.prompt.answer_header);
  out << header.dump() << '\n';
  for (const ThinkEvent& e : t.events) {
    json rec = {{"type", "event"},         {"agent", e.coord.agent}, {"step", e.coord.step},
                {"position", e.position},  {"token_id", e.token},    {"text", e.text}};
    if (e.end_of_thought) rec["end_of_thought"] = true;
    out << rec.dump() << '\n';
  }
  out << json{{"type", "answer"}, {"token_ids", t.answer}, {"text", t.answer_text}}.dump() << '\n';
}

Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool have_answer = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "transcript line " + std::to_string(line_no);
    try {
      const json rec = json::parse(line);
      const std::string type = rec.at("type").get<std::string>();
      if (type == "header") {
        if (rec.value("format", "") != "cothink-transcript") {
          throw ValidationError(where + ": not a cothink transcript");
        }
        t.config = rec.at("config").get<sched::GroupConfig>();
        t.sampler = rec.at("sampler").get<SamplerConfig>();
        t.source = rec.at("source").get<std::string>();
        t.model_checksum = std::stoull(rec.at("model_checksum").get<std::string>(), nullptr, 16);
        if (rec.contains("created")) t.created = rec["created"].get<std::string>();
        t.prompt.prompt_text = rec.at("prompt").at("text").get<std::string>();
        t.prompt.prompt = rec.at("prompt").at("tokens").get<std::vector<TokenId>>();
        for (const json& a : rec.at("agent_prompts")) {
          t.prompt.header_texts.push_back(a.at("text").get<std::string>());
          t.prompt.headers.push_back(a.at("tokens").get<std::vector<TokenId>>());
        }
        t.prompt.answer_header_text = rec.at("answer_header").at("text").get<std::string>();
        t.prompt.answer_header = rec.at("answer_header").at("tokens").get<std::vector<TokenId>>();
        have_header = true;
      } else if (type == "event") {
        if (!have_header) throw ValidationError(where + ": event before header");
        ThinkEvent e;
        e.coord = TokenCoordinate::thought(rec.at("agent").get<int>(), rec.at("step").get<int>());
        e.position = rec.at("position").get<int>();
        e.token = rec.at("token_id").get<TokenId>();
        e.text = rec.at("text").get<std::string>();
        e.end_of_thought = rec.value("end_of_thought", false);
        t.events.push_back(std::move(e));
      } else if (type == "answer") {
        t.answer = rec.at("token_ids").get<std::vector<TokenId>>();
        t.answer_text = rec.at("text").get<std::string>();
        have_answer = true;
      } else {
        throw ValidationError(where + ": unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (!have_header) throw ValidationError("transcript: missing header record");
  if (!have_answer) throw ValidationError("transcript: missing answer record");
  return t;
}

std::optional<std::string> check_transcript(const Transcript& t) {
  const sched::GroupConfig& cfg = t.config;
  std::vector<bool> frozen(cfg.n_agents, false);
  std::size_t next = 0;
  for (const sched::GenerationEvent& ev : sched::generation_order(cfg)) {
    for (const TokenCoordinate& c : ev.tokens) {
      if (frozen[c.agent - 1]) continue;
      if (next >= t.events.size()) return std::nullopt;  // truncated transcripts are fine
      const ThinkEvent& e = t.events[next++];
      if (e.coord != c) {
        return "event " + std::to_string(next) + " is " + to_string(e.coord) + ", expected " +
               to_string(c);
      }
      const int want = sched::own_position(cfg, c);
      if (e.position != want) {
        return "event " + to_string(c) + " at position " + std::to_string(e.position) +
               ", scheduler assigns " + std::to_string(want);
      }
      if (e.end_of_thought) frozen[c.agent - 1] = true;
    }
  }
  if (next != t.events.size()) return "transcript has events beyond the budget";
  return std::nullopt;
}

Transcript replay_think_phase(const Transcript& t, TokenSource& source) {
  Sampler sampler(t.sampler);
  Transcript out = run_think_phase(t.config, source, t.prompt, sampler);
  out.created = t.created;
  return out;
}

}  // namespace cothink::engine
