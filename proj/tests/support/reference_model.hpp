// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

// Straightforward double-precision forward pass used as an oracle. Shares
// only the parameter tensors with the library, none of its code paths.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cothink/bit_matrix.hpp"
#include "cothink/model/transformer.hpp"

namespace cothink::testing {

namespace detail {

inline std::vector<double> rms(const std::vector<double>& x, const std::vector<float>& g) {
  double ms = 0.0;
  for (double v : x) ms += v * v;
  const double inv = 1.0 / std::sqrt(ms / static_cast<double>(x.size()) + 1e-5);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * inv * g[i];
  return y;
}

inline std::vector<double> mv(const std::vector<float>& w, const std::vector<double>& x,
                              std::size_t rows) {
  const std::size_t cols = x.size();
  std::vector<double> y(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) y[r] += static_cast<double>(w[r * cols + c]) * x[c];
  }
  return y;
}

inline void rotate(std::vector<double>& v, int heads, int hd, int pos, double base) {
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < hd / 2; ++i) {
      const double a = pos * std::pow(base, -2.0 * i / hd);
      double& x0 = v[h * hd + 2 * i];
      double& x1 = v[h * hd + 2 * i + 1];
      const double r0 = x0 * std::cos(a) - x1 * std::sin(a);
      const double r1 = x0 * std::sin(a) + x1 * std::cos(a);
      x0 = r0;
      x1 = r1;
    }
  }
}

}  // namespace detail

// Logits for every row, [n x vocab], each row attending to its mask columns.
inline std::vector<std::vector<double>> reference_forward(const model::Model& m,
                                                          std::span<const model::TokenId> tokens,
                                                          std::span<const int> positions,
                                                          const BitMatrix& mask) {
  using namespace detail;
  const auto& c = m.config();
  const std::size_t d = m.width();
  const std::size_t f = m.ffn_width();
  const std::size_t n = tokens.size();
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[i][j] = m.embedding()[tokens[i] * d + j];
  }
  for (const auto& w : m.layers()) {
    std::vector<std::vector<double>> q(n), k(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto h = rms(x[i], w.attn_norm);
      q[i] = mv(w.wq, h, d);
      k[i] = mv(w.wk, h, d);
      v[i] = mv(w.wv, h, d);
      rotate(q[i], c.num_heads, c.head_dim, positions[i], c.rotary_base);
      rotate(k[i], c.num_heads, c.head_dim, positions[i], c.rotary_base);
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> attn(d, 0.0);
      for (int h = 0; h < c.num_heads; ++h) {
        const std::size_t off = static_cast<std::size_t>(h) * c.head_dim;
        std::vector<double> s;
        std::vector<std::size_t> cols;
        double mx = -INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
          if (!mask.get(i, j)) continue;
          double dot = 0.0;
          for (int t = 0; t < c.head_dim; ++t) dot += q[i][off + t] * k[j][off + t];
          dot /= std::sqrt(static_cast<double>(c.head_dim));
          s.push_back(dot);
          cols.push_back(j);
          mx = std::max(mx, dot);
        }
        double total = 0.0;
        for (double& e : s) total += (e = std::exp(e - mx));
        for (std::size_t a = 0; a < cols.size(); ++a) {
          for (int t = 0; t < c.head_dim; ++t) attn[off + t] += s[a] / total * v[cols[a]][off + t];
        }
      }
      auto o = mv(w.wo, attn, d);
      for (std::size_t j = 0; j < d; ++j) x[i][j] += o[j];
      auto h = rms(x[i], w.mlp_norm);
      auto up = mv(w.w_up, h, f);
      for (double& u : up) u = u / (1.0 + std::exp(-u));
      auto down = mv(w.w_down, up, d);
      for (std::size_t j = 0; j < d; ++j) x[i][j] += down[j];
    }
  }
  std::vector<std::vector<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto h = rms(x[i], m.final_norm());
    out[i] = mv(m.embedding(), h, c.vocab_size);
    for (double& v : out[i]) v /= std::sqrt(static_cast<double>(d));
  }
  return out;
}

}  // namespace cothink::testing
