// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

// Completion-coverage metrics for the three task families.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cothink/eval/floyd_warshall.hpp"

namespace cothink::eval {

struct RegisterEntry {
  int i = 0;
  int j = 0;
  double value = 0.0;

  friend bool operator==(const RegisterEntry&, const RegisterEntry&) = default;
};

struct RegisterParse {
  std::vector<RegisterEntry> entries;  // text order
  int malformed = 0;                   // REGISTER occurrences that did not parse
};

// Every well-formed `REGISTER Edges[i][j] = v` in `text`. v is a decimal
// number or inf/infinity in any case.
RegisterParse parse_registers(std::string_view text);

// Fraction of oracle cells with at least one registration equal to the
// oracle value. Out-of-range indices are ignored; a wrong duplicate never
// erases a correct one.
double coverage_fw(std::span<const RegisterEntry> entries, const Matrix& oracle);

// Splits on newlines, commas and semicolons, strips list markers ("1.",
// "2)", "-", "*", bullets) and surrounding whitespace, then applies NFKC
// case folding. Returns the distinct non-empty items.
std::set<std::string> extract_items(std::string_view text);

// Case-folded form of one item, as extract_items would store it.
std::string normalize_item(std::string_view item);

// min(1, |distinct items across agents (∩ valid_set)| / target).
double coverage_enumeration(std::span<const std::string> agent_texts,
                            const std::optional<std::set<std::string>>& valid_set, int target);

enum class StepStatus { kDone, kPartial };

// <DONE_STEP_i> and <PARTIAL_STEP_i> markers; done wins over partial.
std::map<int, StepStatus> parse_step_markers(std::string_view text);

// (#done + partial_weight * #partial) / total_steps over steps 1..total.
double coverage_programming(const std::map<int, StepStatus>& markers, int total_steps,
                            double partial_weight = 0.0);

}  // namespace cothink::eval
