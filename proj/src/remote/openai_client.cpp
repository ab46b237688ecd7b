// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/remote/openai_client.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>

#include "cothink/config_json.hpp"
#include "cothink/errors.hpp"

namespace cothink::remote {

using nlohmann::json;

void ClientConfig::validate() const {
  if (base_url.empty()) {
    throw ValidationError("remote: no base URL (set COTHINK_BASE_URL or source.base_url)");
  }
  if (model.empty()) throw ValidationError("remote: no model (set COTHINK_MODEL or source.model)");
  if (!(timeout_seconds > 0.0)) throw ValidationError("remote: timeout_seconds must be > 0");
  if (max_retries < 0) throw ValidationError("remote: max_retries must be >= 0");
  if (!(backoff_initial_seconds >= 0.0) || !(backoff_max_seconds >= backoff_initial_seconds)) {
    throw ValidationError("remote: backoff bounds must satisfy 0 <= initial <= max");
  }
}

ClientConfig apply_environment(ClientConfig config) {
  if (const char* v = std::getenv("COTHINK_BASE_URL"); v && *v) config.base_url = v;
  if (const char* v = std::getenv("COTHINK_MODEL"); v && *v) config.model = v;
  if (const char* v = std::getenv("COTHINK_API_KEY"); v && *v) config.api_key = v;
  return config;
}

ClientConfig client_config_from_json(const json& j, const std::string& where) {
  ClientConfig c;
  c.base_url = json_get<std::string>(j, "base_url", c.base_url, where);
  c.model = json_get<std::string>(j, "model", c.model, where);
  c.timeout_seconds = json_get<double>(j, "timeout_seconds", c.timeout_seconds, where);
  c.max_retries = json_get<int>(j, "max_retries", c.max_retries, where);
  c.backoff_initial_seconds =
      json_get<double>(j, "backoff_initial_seconds", c.backoff_initial_seconds, where);
  c.backoff_max_seconds = json_get<double>(j, "backoff_max_seconds", c.backoff_max_seconds, where);
  return c;
}

json completion_body(const ClientConfig& config, const CompletionRequest& request) {
  json body = {{"model", config.model},
               {"prompt", request.prompt},
               {"max_tokens", request.max_tokens},
               {"temperature", request.temperature},
               {"logprobs", 1}};
  if (request.seed) body["seed"] = *request.seed;
  if (!request.stop.empty()) body["stop"] = request.stop;
  return body;
}

Completion parse_completion(const std::string& body) {
  try {
    const json j = json::parse(body);
    const json& choice = j.at("choices").at(0);
    Completion c;
    c.text = choice.at("text").get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      c.finish_reason = choice["finish_reason"].get<std::string>();
    }
    if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
        choice["logprobs"].contains("tokens")) {
      c.tokens = choice["logprobs"]["tokens"].get<std::vector<std::string>>();
    }
    std::string joined;
    for (const auto& t : c.tokens) joined += t;
    if (joined != c.text) {
      c.tokens.clear();
      if (!c.text.empty()) c.tokens.push_back(c.text);
    }
    return c;
  } catch (const json::exception& e) {
    throw RuntimeFailure(std::string("remote: malformed completion response: ") + e.what());
  }
}

namespace {

std::optional<double> retry_after_seconds(const httplib::Result& res) {
  if (!res || !res->has_header("Retry-After")) return std::nullopt;
  const std::string v = res->get_header_value("Retry-After");
  double secs = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), secs);
  if (ec != std::errc() || ptr != v.data() + v.size() || !(secs >= 0.0)) return std::nullopt;
  return secs;
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

}  // namespace

OpenAIClient::OpenAIClient(ClientConfig config, SleepFn sleep)
    : config_(std::move(config)), sleep_(std::move(sleep)) {
  config_.validate();
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url)) {
    throw ValidationError("remote: base URL '" + config_.base_url + "' is not http(s)://host[/path]");
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].str();
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (!sleep_) {
    sleep_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  }
}

double OpenAIClient::backoff_seconds(int attempt) const {
  const double d = config_.backoff_initial_seconds * std::ldexp(1.0, attempt - 1);
  return std::min(d, config_.backoff_max_seconds);
}

Completion OpenAIClient::complete(const CompletionRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto whole = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - whole);
  client.set_connection_timeout(whole.count(), micros.count());
  client.set_read_timeout(whole.count(), micros.count());
  client.set_write_timeout(whole.count(), micros.count());
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const std::string body = completion_body(config_, request).dump();
  const std::string path = path_prefix_ + "/completions";

  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    httplib::Result res = client.Post(path, headers, body, "application/json");
    if (res && res->status >= 200 && res->status < 300) return parse_completion(res->body);
    if (res) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      if (!retryable_status(res->status)) break;
    } else {
      last_error = "connection failed: " + httplib::to_string(res.error());
    }
    if (attempt >= config_.max_retries) break;
    const double wait = retry_after_seconds(res).value_or(backoff_seconds(attempt + 1));
    sleep_(std::chrono::duration<double>(wait));
  }
  throw RuntimeFailure("remote: " + scheme_host_port_ + path + " failed: " + last_error);
}

}  // namespace cothink::remote
