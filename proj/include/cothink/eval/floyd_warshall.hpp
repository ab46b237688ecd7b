// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cothink::eval {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using Matrix = std::vector<std::vector<double>>;

// Directed graph as a dense weight matrix; kInfinity marks a missing edge.
struct WeightedGraph {
  Matrix weights;

  int size() const { return static_cast<int>(weights.size()); }
  // Square, zero diagonal, off-diagonal weights nonnegative or infinite.
  // Throws ValidationError.
  void validate() const;
};

// All-pairs shortest distances by the k, i, j triple loop.
Matrix floyd_warshall(const WeightedGraph& g);

// The matrix after relaxing every (i, j) through pivot k once:
//   min(edges[i][j], edges[i][k] + edges[k][j])
Matrix fw_step_oracle(const Matrix& edges, int k);

// Numbers, or the strings "inf" / "infinity" (any case).
double parse_weight(const nlohmann::json& j);
WeightedGraph graph_from_json(const nlohmann::json& rows);
nlohmann::json graph_to_json(const Matrix& m);

// Matches the rendering a solver writes into a REGISTER line.
std::string format_weight(double w);

}  // namespace cothink::eval
