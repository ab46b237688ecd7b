// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cothink::remote {

struct ClientConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model;
  std::string api_key;   // sent as a bearer token when non-empty
  double timeout_seconds = 60.0;
  int max_retries = 3;   // retries after the first attempt
  double backoff_initial_seconds = 0.5;
  double backoff_max_seconds = 30.0;

  void validate() const;
};

// Fills base_url, model and api_key from COTHINK_BASE_URL, COTHINK_MODEL and
// COTHINK_API_KEY where set.
ClientConfig apply_environment(ClientConfig config);

// Reads {"timeout_seconds", "max_retries", "backoff_initial_seconds",
// "backoff_max_seconds", "base_url", "model"}; the API key only ever comes
// from the environment.
ClientConfig client_config_from_json(const nlohmann::json& j, const std::string& where);

struct CompletionRequest {
  std::string prompt;
  int max_tokens = 16;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> stop;
};

struct Completion {
  std::string text;
  // Server tokenization from logprobs when available, else the whole text
  // as one piece. Concatenates to `text`.
  std::vector<std::string> tokens;
  std::string finish_reason;  // "stop", "length", ...
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual Completion complete(const CompletionRequest& request) = 0;
};

// POST {base_url}/completions. Retries connection failures, 429 and 5xx
// with exponential backoff, honoring Retry-After when the server sends one.
// Other failures throw RuntimeFailure.
class OpenAIClient : public CompletionClient {
 public:
  using SleepFn = std::function<void(std::chrono::duration<double>)>;

  explicit OpenAIClient(ClientConfig config, SleepFn sleep = {});

  Completion complete(const CompletionRequest& request) override;
  const ClientConfig& config() const { return config_; }

  // Delay before retry `attempt` (1-based) absent a Retry-After header.
  double backoff_seconds(int attempt) const;

 private:
  ClientConfig config_;
  SleepFn sleep_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

nlohmann::json completion_body(const ClientConfig& config, const CompletionRequest& request);
// Parses a completions response body; throws RuntimeFailure when malformed.
Completion parse_completion(const std::string& body);

}  // namespace cothink::remote
