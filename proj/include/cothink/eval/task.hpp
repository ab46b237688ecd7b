// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cothink/eval/floyd_warshall.hpp"
#include "cothink/remote/openai_client.hpp"

namespace cothink::eval {

enum class TaskKind { kEnumeration, kFloydWarshall, kProgramming };

std::string_view task_kind_name(TaskKind kind);

// Turns a response into step markers for programming tasks.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual std::string name() const = 0;
  virtual std::string mark(const std::string& specification, const std::string& response) = 0;
};

// Responses are assumed to carry their own markers.
class PassthroughJudge : public Judge {
 public:
  std::string name() const override { return "passthrough"; }
  std::string mark(const std::string&, const std::string& response) override { return response; }
};

// Asks a completion endpoint to emit one marker per numbered step.
class RemoteJudge : public Judge {
 public:
  explicit RemoteJudge(remote::CompletionClient& client) : client_(&client) {}
  std::string name() const override { return "remote"; }
  std::string mark(const std::string& specification, const std::string& response) override;

  static std::string judge_prompt(const std::string& specification, const std::string& response);

 private:
  remote::CompletionClient* client_;
};

struct Task {
  std::string id;
  TaskKind kind = TaskKind::kEnumeration;
  std::string prompt;

  // enumeration
  int target_count = 0;  // L
  std::optional<std::set<std::string>> valid_set;

  // Floyd-Warshall
  WeightedGraph graph;
  int pivot = 0;
  bool full_run = false;  // score against the full algorithm instead

  // programming
  std::vector<std::string> steps;
  double partial_weight = 0.0;

  // The matrix coverage_fw scores against.
  Matrix fw_oracle() const;
  void validate() const;
};

// Enumeration: {"type": "enumeration", "prompt", "L", "valid_set": [..] or
// "path"}. Floyd-Warshall: {"type": "floyd_warshall", "weights", "pivot",
// "full_run"}. Programming: {"type": "programming", "steps", "partial_weight"}.
// Relative valid_set paths resolve against `base_dir`.
Task task_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                    const std::string& where = "task");
Task load_task(const std::filesystem::path& path);

// Coverage of the combined per-agent texts. `judge` is only consulted for
// programming tasks; nullptr means passthrough.
double score(const Task& task, std::span<const std::string> agent_texts, Judge* judge = nullptr);

// Items a scripted agent may emit, each one line of solution text: the
// valid set (or synthetic names) for enumeration, correct REGISTER lines in
// row-major order for Floyd-Warshall, DONE markers for programming.
std::vector<std::string> solution_pool(const Task& task, int min_size);

}  // namespace cothink::eval
