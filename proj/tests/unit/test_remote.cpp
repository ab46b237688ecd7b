// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cothink/engine/decode.hpp"
#include "cothink/engine/remote_source.hpp"
#include "cothink/errors.hpp"
#include "cothink/remote/openai_client.hpp"

namespace cothink::remote {
namespace {

using nlohmann::json;

struct Reply {
  int status = 200;
  std::string body;
  std::string retry_after;
};

std::string completion_json(const std::vector<std::string>& tokens, const std::string& finish) {
  std::string text;
  for (const auto& t : tokens) text += t;
  return json{{"choices", {{{"text", text}, {"finish_reason", finish}, {"logprobs", {{"tokens", tokens}}}}}}}
      .dump();
}

// Local completions endpoint serving scripted replies in order.
class MockServer {
 public:
  MockServer() {
    server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard<std::mutex> lock(mu_);
      bodies.push_back(json::parse(req.body));
      auth.push_back(req.get_header_value("Authorization"));
      Reply r = replies_.empty() ? Reply{200, completion_json({"."}, "stop"), ""} : replies_.front();
      if (!replies_.empty()) replies_.pop_front();
      res.status = r.status;
      if (!r.retry_after.empty()) res.set_header("Retry-After", r.retry_after);
      res.set_content(r.body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  void push(Reply r) {
    std::lock_guard<std::mutex> lock(mu_);
    replies_.push_back(std::move(r));
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::size_t requests() {
    std::lock_guard<std::mutex> lock(mu_);
    return bodies.size();
  }

  std::vector<json> bodies;
  std::vector<std::string> auth;

 private:
  httplib::Server server_;
  std::thread thread_;
  std::mutex mu_;
  std::deque<Reply> replies_;
  int port_ = 0;
};

ClientConfig config_for(const MockServer& s) {
  ClientConfig c;
  c.base_url = s.url();
  c.model = "tiny";
  c.api_key = "secret";
  c.timeout_seconds = 5;
  c.max_retries = 2;
  c.backoff_initial_seconds = 0.5;
  c.backoff_max_seconds = 4;
  return c;
}

struct SleepLog {
  std::vector<double> waits;
  OpenAIClient::SleepFn fn() {
    return [this](std::chrono::duration<double> d) { waits.push_back(d.count()); };
  }
};

TEST(OpenAIClient, SendsTheRequestAndSplitsTokens) {
  MockServer server;
  server.push({200, completion_json({"Hel", "lo", "!"}, "length"), ""});
  SleepLog sleep;
  OpenAIClient client(config_for(server), sleep.fn());
  CompletionRequest req;
  req.prompt = "Say hi";
  req.max_tokens = 3;
  req.temperature = 0.6;
  req.seed = 9;
  const Completion c = client.complete(req);
  EXPECT_EQ(c.text, "Hello!");
  EXPECT_EQ(c.tokens, (std::vector<std::string>{"Hel", "lo", "!"}));
  EXPECT_EQ(c.finish_reason, "length");
  ASSERT_EQ(server.bodies.size(), 1u);
  const json& b = server.bodies[0];
  EXPECT_EQ(b["model"], "tiny");
  EXPECT_EQ(b["prompt"], "Say hi");
  EXPECT_EQ(b["max_tokens"], 3);
  EXPECT_EQ(b["logprobs"], 1);
  EXPECT_EQ(b["seed"], 9);
  EXPECT_EQ(server.auth[0], "Bearer secret");
  EXPECT_TRUE(sleep.waits.empty());
}

TEST(OpenAIClient, RetriesServerErrorsWithExponentialBackoff) {
  MockServer server;
  server.push({503, "busy", ""});
  server.push({500, "oops", ""});
  server.push({200, completion_json({"ok"}, "stop"), ""});
  SleepLog sleep;
  OpenAIClient client(config_for(server), sleep.fn());
  EXPECT_EQ(client.complete({}).text, "ok");
  EXPECT_EQ(sleep.waits, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(client.backoff_seconds(10), 4.0);
}

TEST(OpenAIClient, HonorsRetryAfter) {
  MockServer server;
  server.push({429, "slow down", "2"});
  server.push({200, completion_json({"ok"}, "stop"), ""});
  SleepLog sleep;
  OpenAIClient client(config_for(server), sleep.fn());
  EXPECT_EQ(client.complete({}).text, "ok");
  EXPECT_EQ(sleep.waits, (std::vector<double>{2.0}));
}

TEST(OpenAIClient, GivesUpAfterTheRetryBudget) {
  MockServer server;
  for (int i = 0; i < 3; ++i) server.push({502, "bad gateway", ""});
  SleepLog sleep;
  OpenAIClient client(config_for(server), sleep.fn());
  EXPECT_THROW(client.complete({}), RuntimeFailure);
  EXPECT_EQ(server.requests(), 3u);
  EXPECT_EQ(sleep.waits.size(), 2u);
}

TEST(OpenAIClient, ClientErrorsAreNotRetried) {
  MockServer server;
  server.push({400, R"({"error": "bad prompt"})", ""});
  SleepLog sleep;
  OpenAIClient client(config_for(server), sleep.fn());
  try {
    client.complete({});
    FAIL() << "expected RuntimeFailure";
  } catch (const RuntimeFailure& e) {
    EXPECT_NE(std::string(e.what()).find("HTTP 400"), std::string::npos);
  }
  EXPECT_EQ(server.requests(), 1u);
  EXPECT_TRUE(sleep.waits.empty());
}

TEST(OpenAIClient, ConnectionFailureRetriesThenThrows) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  ClientConfig c;
  c.base_url = "http://127.0.0.1:" + std::to_string(port);
  c.model = "m";
  c.timeout_seconds = 1;
  c.max_retries = 1;
  SleepLog sleep;
  OpenAIClient client(c, sleep.fn());
  EXPECT_THROW(client.complete({}), RuntimeFailure);
  EXPECT_EQ(sleep.waits.size(), 1u);
}

TEST(OpenAIClient, MalformedResponsesAndConfig) {
  EXPECT_THROW(parse_completion("{}"), RuntimeFailure);
  EXPECT_THROW(parse_completion("not json"), RuntimeFailure);
  // Tokens that do not reassemble the text fall back to one piece.
  const Completion c = parse_completion(
      R"({"choices": [{"text": "abc", "logprobs": {"tokens": ["a", "x"]}, "finish_reason": "stop"}]})");
  EXPECT_EQ(c.tokens, (std::vector<std::string>{"abc"}));
  ClientConfig bad;
  EXPECT_THROW(OpenAIClient{bad}, ValidationError);
  bad.base_url = "ftp://host";
  bad.model = "m";
  EXPECT_THROW(OpenAIClient{bad}, ValidationError);
}

TEST(OpenAIClient, EnvironmentOverrides) {
  ::setenv("COTHINK_BASE_URL", "http://example.invalid/v1", 1);
  ::setenv("COTHINK_MODEL", "env-model", 1);
  ::setenv("COTHINK_API_KEY", "k", 1);
  const ClientConfig c = apply_environment({});
  EXPECT_EQ(c.base_url, "http://example.invalid/v1");
  EXPECT_EQ(c.model, "env-model");
  EXPECT_EQ(c.api_key, "k");
  ::unsetenv("COTHINK_BASE_URL");
  ::unsetenv("COTHINK_MODEL");
  ::unsetenv("COTHINK_API_KEY");
}

// ---------------------------------------------------------------------------
// Remote token source

class ScriptedClient : public CompletionClient {
 public:
  Completion complete(const CompletionRequest& r) override {
    requests.push_back(r);
    if (replies.empty()) return {"", {}, "stop"};
    Completion c = replies.front();
    replies.pop_front();
    return c;
  }
  std::deque<Completion> replies;
  std::vector<CompletionRequest> requests;
};

Completion chunk(std::vector<std::string> tokens, std::string finish = "length") {
  std::string text;
  for (const auto& t : tokens) text += t;
  return {text, std::move(tokens), std::move(finish)};
}

engine::RemoteSourceConfig source_config(int c) {
  engine::RemoteSourceConfig cfg;
  cfg.chunk = c;
  cfg.instruction_template = "Q={QUESTION} you={ThinkerID}";
  return cfg;
}

sched::GroupConfig group(int n, int k, sched::Mode mode, const engine::SessionPrompt& p) {
  sched::GroupConfig c;
  c.n_agents = n;
  c.budget = k;
  c.mode = mode;
  c.prompt_len = p.prompt_len();
  c.agent_prompt_len = p.header_len();
  return c;
}

TEST(RemoteSource, ChunksAndRebuildsContextFromTheView) {
  const engine::SessionPrompt p = engine::make_session_prompt("2+2?", "T{n}: ", 2, "A: ");
  ScriptedClient client;
  client.replies = {chunk({"a1", "a2"}), chunk({"b1", "b2"}), chunk({"a3"}, "stop"),
                    chunk({"b3", "b4"})};
  engine::RemoteSource src(client, source_config(2));
  engine::Sampler sampler({});
  const engine::Transcript t =
      engine::run_think_phase(group(2, 4, sched::Mode::kGroupInterleaved, p), src, p, sampler);
  EXPECT_EQ(t.chain_text(1), "a1a2a3");
  EXPECT_EQ(t.chain_text(2), "b1b2b3b4");
  EXPECT_EQ(t.lengths(), (std::vector<int>{4, 4}));  // agent 1 ends with end-of-thought
  ASSERT_EQ(client.requests.size(), 4u);
  EXPECT_EQ(client.requests[0].prompt, "Q=2+2? you=1\n\nT1: ");
  // Agent 2's first chunk sees agent 1's first token only (interleaved step 1).
  EXPECT_EQ(client.requests[1].prompt, "Q=2+2? you=2\n\nT1: a1\n\nT2: ");
  EXPECT_EQ(client.requests[2].prompt, "Q=2+2? you=1\n\nT2: b1b2\n\nT1: a1a2");
  EXPECT_EQ(client.requests[0].max_tokens, 2);
  for (const auto& e : t.events) EXPECT_EQ(e.token, engine::RemoteSource::kRemoteToken);
}

TEST(RemoteSource, IndependentModeHidesOtherChains) {
  const engine::SessionPrompt p = engine::make_session_prompt("q", "T{n}: ", 2, "A: ");
  ScriptedClient client;
  client.replies = {chunk({"x"}), chunk({"y"}), chunk({"z"}), chunk({"w"})};
  engine::RemoteSource src(client, source_config(1));
  engine::Sampler sampler({});
  engine::run_think_phase(group(2, 2, sched::Mode::kIndependent, p), src, p, sampler);
  ASSERT_EQ(client.requests.size(), 4u);
  EXPECT_EQ(client.requests[3].prompt, "Q=q you=2\n\nT2: y");
}

TEST(RemoteSource, AnswerConcatenatesChains) {
  const engine::SessionPrompt p = engine::make_session_prompt("q", "T{n}: ", 2, "A: ");
  ScriptedClient client;
  client.replies = {chunk({"x"}), chunk({"y"}), chunk({"4", "!"}, "stop")};
  engine::RemoteSource src(client, source_config(1));
  engine::Sampler sampler({});
  engine::Transcript t =
      engine::run_think_phase(group(2, 1, sched::Mode::kGroupLockstep, p), src, p, sampler);
  engine::run_answer_phase(t, src, sampler, 1);
  EXPECT_EQ(client.requests.back().prompt, "q\n\nT1: x\n\nT2: y\n\nA: ");
  EXPECT_EQ(client.requests.back().max_tokens, 1);
  EXPECT_EQ(t.answer_text, "4");
}

TEST(RemoteSource, EndToEndOverHttp) {
  MockServer server;
  server.push({200, completion_json({"one", " two"}, "length"), ""});
  server.push({200, completion_json({"three"}, "stop"), ""});
  SleepLog sleep;
  OpenAIClient client(config_for(server), sleep.fn());
  engine::RemoteSource src(client, source_config(2));
  const engine::SessionPrompt p = engine::make_session_prompt("q", "T{n}: ", 1, "A: ");
  engine::Sampler sampler({});
  const engine::Transcript t =
      engine::run_think_phase(group(1, 5, sched::Mode::kSingleChain, p), src, p, sampler);
  EXPECT_EQ(t.chain_text(1), "one twothree");
  EXPECT_EQ(server.requests(), 2u);
}

}  // namespace
}  // namespace cothink::remote
