// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/eval/coverage.hpp"

#include <algorithm>
#include <regex>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "cothink/errors.hpp"

namespace cothink::eval {

namespace {

const std::regex& register_pattern() {
  static const std::regex re(
      R"(REGISTER\s+Edges\s*\[\s*(\d{1,9})\s*\]\s*\[\s*(\d{1,9})\s*\]\s*=\s*)"
      R"(([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?|[iI][nN][fF](?:[iI][nN][iI][tT][yY])?))"
      R"((?![\w.]))");
  return re;
}

double parse_value(const std::string& s) {
  if (s.size() >= 3 && (s[0] == 'i' || s[0] == 'I')) return kInfinity;
  return std::stod(s);
}

std::string_view trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::string nfkc_casefold(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status)) throw RuntimeFailure("ICU: NFKC casefold data unavailable");
  const icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) throw RuntimeFailure("ICU: normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

const std::regex& list_marker() {
  static const std::regex re(R"(^(?:\(?\d+[.):]|[-*+]|\xE2\x80\xA2|\xC2\xB7)\s*)");
  return re;
}

}  // namespace

RegisterParse parse_registers(std::string_view text) {
  RegisterParse out;
  const std::string s(text);
  const std::string key = "REGISTER";
  for (std::size_t at = s.find(key); at != std::string::npos; at = s.find(key, at + 1)) {
    std::smatch m;
    if (!std::regex_search(s.cbegin() + static_cast<std::ptrdiff_t>(at), s.cend(), m,
                           register_pattern(), std::regex_constants::match_continuous)) {
      ++out.malformed;
      continue;
    }
    try {
      out.entries.push_back({std::stoi(m[1].str()), std::stoi(m[2].str()), parse_value(m[3].str())});
    } catch (const std::out_of_range&) {
      ++out.malformed;
    }
  }
  return out;
}

double coverage_fw(std::span<const RegisterEntry> entries, const Matrix& oracle) {
  const int n = static_cast<int>(oracle.size());
  if (n == 0) return 0.0;
  std::vector<bool> solved(static_cast<std::size_t>(n) * n, false);
  int count = 0;
  for (const RegisterEntry& e : entries) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) continue;
    const std::size_t cell = static_cast<std::size_t>(e.i) * n + e.j;
    if (solved[cell] || e.value != oracle[e.i][e.j]) continue;
    solved[cell] = true;
    ++count;
  }
  return static_cast<double>(count) / (static_cast<double>(n) * n);
}

std::string normalize_item(std::string_view item) {
  std::string folded = nfkc_casefold(item);
  std::string_view t = trim(folded);
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(t.begin(), t.end(), m, list_marker())) t.remove_prefix(m.length(0));
  return std::string(trim(t));
}

std::set<std::string> extract_items(std::string_view text) {
  const std::string folded = nfkc_casefold(text);
  std::set<std::string> items;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= folded.size(); ++i) {
    if (i < folded.size() && folded[i] != '\n' && folded[i] != ',' && folded[i] != ';') continue;
    std::string item = normalize_item(std::string_view(folded).substr(start, i - start));
    if (!item.empty()) items.insert(std::move(item));
    start = i + 1;
  }
  return items;
}

double coverage_enumeration(std::span<const std::string> agent_texts,
                            const std::optional<std::set<std::string>>& valid_set, int target) {
  if (target < 1) throw ValidationError("enumeration coverage: target count must be >= 1");
  std::set<std::string> all;
  for (const std::string& t : agent_texts) all.merge(extract_items(t));
  std::size_t count = all.size();
  if (valid_set) {
    std::set<std::string> valid;
    for (const std::string& v : *valid_set) valid.insert(normalize_item(v));
    count = static_cast<std::size_t>(
        std::count_if(all.begin(), all.end(), [&](const std::string& s) { return valid.contains(s); }));
  }
  return std::min(1.0, static_cast<double>(count) / target);
}

std::map<int, StepStatus> parse_step_markers(std::string_view text) {
  static const std::regex re(R"(<(DONE|PARTIAL)_STEP_(\d{1,9})>)");
  std::map<int, StepStatus> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    const int step = std::stoi((*it)[2].str());
    const StepStatus status = (*it)[1].str() == "DONE" ? StepStatus::kDone : StepStatus::kPartial;
    auto [pos, fresh] = out.emplace(step, status);
    if (!fresh && status == StepStatus::kDone) pos->second = StepStatus::kDone;
  }
  return out;
}

double coverage_programming(const std::map<int, StepStatus>& markers, int total_steps,
                            double partial_weight) {
  if (total_steps < 1) throw ValidationError("programming coverage: total steps must be >= 1");
  if (!(partial_weight >= 0.0 && partial_weight <= 1.0)) {
    throw ValidationError("programming coverage: partial weight must lie in [0, 1]");
  }
  double credit = 0.0;
  for (const auto& [step, status] : markers) {
    if (step < 1 || step > total_steps) continue;
    credit += status == StepStatus::kDone ? 1.0 : partial_weight;
  }
  return credit / total_steps;
}

}  // namespace cothink::eval
