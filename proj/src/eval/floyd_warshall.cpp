// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/eval/floyd_warshall.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "cothink/errors.hpp"

namespace cothink::eval {

void WeightedGraph::validate() const {
  const std::size_t n = weights.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i].size() != n) {
      throw ValidationError("graph: row " + std::to_string(i) + " has " +
                            std::to_string(weights[i].size()) + " entries, expected " +
                            std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights[i][j];
      if (i == j && w != 0.0) {
        throw ValidationError("graph: diagonal entry " + std::to_string(i) + " must be 0");
      }
      if (std::isnan(w) || w < 0.0) {
        throw ValidationError("graph: weight (" + std::to_string(i) + "," + std::to_string(j) +
                              ") must be nonnegative");
      }
    }
  }
}

Matrix floyd_warshall(const WeightedGraph& g) {
  g.validate();
  Matrix d = g.weights;
  const int n = g.size();
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

Matrix fw_step_oracle(const Matrix& edges, int k) {
  const int n = static_cast<int>(edges.size());
  if (k < 0 || k >= n) {
    throw ValidationError("fw_step_oracle: pivot " + std::to_string(k) + " outside 0.." +
                          std::to_string(n - 1));
  }
  // Reads only the original matrix; row and column k are fixed points anyway.
  Matrix out = edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i][j] = std::min(edges[i][j], edges[i][k] + edges[k][j]);
  }
  return out;
}

double parse_weight(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "inf" || s == "infinity") return kInfinity;
  }
  throw ValidationError("graph: weight must be a number or \"inf\", got " + j.dump());
}

WeightedGraph graph_from_json(const nlohmann::json& rows) {
  if (!rows.is_array()) throw ValidationError("graph: weights must be an array of rows");
  WeightedGraph g;
  for (const auto& row : rows) {
    if (!row.is_array()) throw ValidationError("graph: weights must be an array of rows");
    std::vector<double> r;
    for (const auto& w : row) r.push_back(parse_weight(w));
    g.weights.push_back(std::move(r));
  }
  g.validate();
  return g;
}

nlohmann::json graph_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m) {
    nlohmann::json r = nlohmann::json::array();
    for (double w : row) {
      if (std::isinf(w)) {
        r.push_back("inf");
      } else {
        r.push_back(w);
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_weight(double w) {
  if (std::isinf(w)) return w > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

}  // namespace cothink::eval
