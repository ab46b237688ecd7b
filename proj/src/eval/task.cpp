// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/eval/task.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cothink/config_json.hpp"
#include "cothink/errors.hpp"
#include "cothink/eval/coverage.hpp"

namespace cothink::eval {

using nlohmann::json;

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kEnumeration:
      return "enumeration";
    case TaskKind::kFloydWarshall:
      return "floyd_warshall";
    case TaskKind::kProgramming:
      return "programming";
  }
  return "unknown";
}

std::string RemoteJudge::judge_prompt(const std::string& specification,
                                      const std::string& response) {
  return "You grade a candidate program against a numbered specification.\n"
         "For every step the candidate implements completely, write <DONE_STEP_n>.\n"
         "For every step it implements only in part, write <PARTIAL_STEP_n>.\n"
         "Write nothing else.\n\nSpecification:\n" +
         specification + "\n\nCandidate:\n" + response + "\n\nMarkers:";
}

std::string RemoteJudge::mark(const std::string& specification, const std::string& response) {
  remote::CompletionRequest req;
  req.prompt = judge_prompt(specification, response);
  req.max_tokens = 256;
  req.temperature = 0.0;
  return client_->complete(req).text;
}

Matrix Task::fw_oracle() const {
  return full_run ? floyd_warshall(graph) : fw_step_oracle(graph.weights, pivot);
}

void Task::validate() const {
  switch (kind) {
    case TaskKind::kEnumeration:
      if (target_count < 1) throw ValidationError("task.L must be >= 1");
      break;
    case TaskKind::kFloydWarshall:
      graph.validate();
      if (graph.size() == 0) throw ValidationError("task.weights must be non-empty");
      if (pivot < 0 || pivot >= graph.size()) {
        throw ValidationError("task.pivot must lie in 0.." + std::to_string(graph.size() - 1));
      }
      break;
    case TaskKind::kProgramming:
      if (steps.empty()) throw ValidationError("task.steps must be non-empty");
      if (!(partial_weight >= 0.0 && partial_weight <= 1.0)) {
        throw ValidationError("task.partial_weight must lie in [0, 1]");
      }
      break;
  }
}

namespace {

std::set<std::string> read_valid_set(const json& v, const std::filesystem::path& base_dir,
                                     const std::string& where) {
  std::set<std::string> out;
  if (v.is_array()) {
    for (const auto& item : v) {
      if (!item.is_string()) throw ValidationError(where + ".valid_set: items must be strings");
      out.insert(normalize_item(item.get<std::string>()));
    }
  } else if (v.is_string()) {
    const std::filesystem::path path = base_dir / v.get<std::string>();
    std::ifstream in(path);
    if (!in) throw ValidationError(where + ".valid_set: cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
      std::string item = normalize_item(line);
      if (!item.empty()) out.insert(std::move(item));
    }
  } else {
    throw ValidationError(where + ".valid_set: expected an array or a file path");
  }
  return out;
}

}  // namespace

Task task_from_json(const json& j, const std::filesystem::path& base_dir, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  Task t;
  const std::string type = json_get<std::string>(j, "type", "", where);
  t.id = json_get<std::string>(j, "id", type, where);
  t.prompt = json_get<std::string>(j, "prompt", "", where);
  if (type == "enumeration") {
    require_known_keys(j, {"type", "id", "prompt", "L", "valid_set"}, where);
    t.kind = TaskKind::kEnumeration;
    t.target_count = json_get<int>(j, "L", 0, where);
    if (j.contains("valid_set")) t.valid_set = read_valid_set(j["valid_set"], base_dir, where);
  } else if (type == "floyd_warshall") {
    require_known_keys(j, {"type", "id", "prompt", "weights", "pivot", "full_run"}, where);
    t.kind = TaskKind::kFloydWarshall;
    if (!j.contains("weights")) throw ValidationError(where + ".weights: missing");
    try {
      t.graph = graph_from_json(j["weights"]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ".weights: " + e.what());
    }
    t.pivot = json_get<int>(j, "pivot", 0, where);
    t.full_run = json_get<bool>(j, "full_run", false, where);
  } else if (type == "programming") {
    require_known_keys(j, {"type", "id", "prompt", "steps", "partial_weight"}, where);
    t.kind = TaskKind::kProgramming;
    t.steps = json_get<std::vector<std::string>>(j, "steps", {}, where);
    t.partial_weight = json_get<double>(j, "partial_weight", 0.0, where);
  } else {
    throw ValidationError(where + ".type: unknown task type '" + type +
                          "' (enumeration, floyd_warshall, programming)");
  }
  t.validate();
  return t;
}

Task load_task(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open task file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return task_from_json(j, path.parent_path(), path.string());
}

double score(const Task& task, std::span<const std::string> agent_texts, Judge* judge) {
  switch (task.kind) {
    case TaskKind::kEnumeration:
      return coverage_enumeration(agent_texts, task.valid_set, task.target_count);
    case TaskKind::kFloydWarshall: {
      std::vector<RegisterEntry> all;
      for (const std::string& text : agent_texts) {
        const RegisterParse p = parse_registers(text);
        all.insert(all.end(), p.entries.begin(), p.entries.end());
      }
      return coverage_fw(all, task.fw_oracle());
    }
    case TaskKind::kProgramming: {
      std::string spec;
      for (std::size_t i = 0; i < task.steps.size(); ++i) {
        spec += std::to_string(i + 1) + ". " + task.steps[i] + "\n";
      }
      std::string combined;
      for (const std::string& text : agent_texts) combined += text + "\n";
      PassthroughJudge passthrough;
      Judge& j = judge ? *judge : passthrough;
      return coverage_programming(parse_step_markers(j.mark(spec, combined)),
                                  static_cast<int>(task.steps.size()), task.partial_weight);
    }
  }
  return 0.0;
}

std::vector<std::string> solution_pool(const Task& task, int min_size) {
  std::vector<std::string> pool;
  switch (task.kind) {
    case TaskKind::kEnumeration:
      if (task.valid_set) pool.assign(task.valid_set->begin(), task.valid_set->end());
      for (int i = static_cast<int>(pool.size()); i < min_size; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "item-%05d", i + 1);
        pool.emplace_back(buf);
      }
      break;
    case TaskKind::kFloydWarshall: {
      const Matrix oracle = task.fw_oracle();
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        for (std::size_t j = 0; j < oracle.size(); ++j) {
          pool.push_back("REGISTER Edges[" + std::to_string(i) + "][" + std::to_string(j) +
                         "] = " + format_weight(oracle[i][j]));
        }
      }
      break;
    }
    case TaskKind::kProgramming:
      for (std::size_t s = 1; s <= task.steps.size(); ++s) {
        pool.push_back("<DONE_STEP_" + std::to_string(s) + ">");
      }
      break;
  }
  return pool;
}

}  // namespace cothink::eval
