// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/model/transformer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <unordered_set>

#include "cothink/errors.hpp"
#include "cothink/simd/kernels.hpp"

namespace cothink::model {

void ModelConfig::validate() const {
  if (num_layers < 1 || num_heads < 1 || head_dim < 1 || vocab_size < 1 ||
      ffn_multiplier < 1) {
    throw ValidationError("model config: all counts must be >= 1");
  }
  if (model_width != 0) {
    if (model_width % num_heads != 0) {
      throw ValidationError("model config: width " + std::to_string(model_width) +
                            " is not divisible by num_heads " + std::to_string(num_heads));
    }
    if (model_width / num_heads != head_dim) {
      throw ValidationError("model config: num_heads * head_dim must equal the model width");
    }
  }
  if (head_dim % 2 != 0) {
    throw ValidationError("model config: head_dim must be even for rotary encoding");
  }
  if (!(rotary_base > 0.0) || !std::isfinite(rotary_base)) {
    throw ValidationError("model config: rotary_base must be a positive real");
  }
}

// ---------------------------------------------------------------------------
// KVCache

KVCache::KVCache(int num_layers, int width)
    : num_layers_(num_layers), width_(width), keys_(num_layers), values_(num_layers) {}

std::optional<std::size_t> KVCache::find(const TokenCoordinate& coord) const {
  auto it = index_.find(coord);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> KVCache::key(int layer, std::size_t index) const {
  return {keys_[layer].data() + index * width_, static_cast<std::size_t>(width_)};
}

std::span<const float> KVCache::value(int layer, std::size_t index) const {
  return {values_[layer].data() + index * width_, static_cast<std::size_t>(width_)};
}

class CacheWriter {
 public:
  static std::size_t open_entry(KVCache& cache, const CacheEntry& entry) {
    const std::size_t idx = cache.entries_.size();
    cache.entries_.push_back(entry);
    cache.index_.emplace(entry.coord, idx);
    return idx;
  }
  static void push(KVCache& cache, int layer, std::span<const float> k,
                   std::span<const float> v) {
    cache.keys_[layer].insert(cache.keys_[layer].end(), k.begin(), k.end());
    cache.values_[layer].insert(cache.values_[layer].end(), v.begin(), v.end());
  }
};

// ---------------------------------------------------------------------------
// Model

namespace {

std::vector<float> normal_tensor(std::mt19937_64& rng, std::size_t n, float stddev) {
  std::normal_distribution<float> dist(0.0f, stddev);
  std::vector<float> out(n);
  for (float& x : out) x = dist(rng);
  return out;
}

void fnv_mix(std::uint64_t& h, const std::vector<float>& data) {
  for (float f : data) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
    for (int b = 0; b < 4; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFU;
      h *= 0x100000001B3ULL;
    }
  }
}

}  // namespace

Model Model::init(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.width();
  const std::size_t f = d * config.ffn_multiplier;
  const float depth_scale = 1.0f / std::sqrt(2.0f * static_cast<float>(config.num_layers));
  std::mt19937_64 rng(config.seed);

  Model m;
  m.config_ = config;
  m.embedding_ = normal_tensor(rng, static_cast<std::size_t>(config.vocab_size) * d, 1.0f);
  const float in_scale = 1.0f / std::sqrt(static_cast<float>(d));
  const float down_scale = depth_scale / std::sqrt(static_cast<float>(f));
  for (int l = 0; l < config.num_layers; ++l) {
    LayerWeights w;
    w.attn_norm.assign(d, 1.0f);
    w.wq = normal_tensor(rng, d * d, in_scale);
    w.wk = normal_tensor(rng, d * d, in_scale);
    w.wv = normal_tensor(rng, d * d, in_scale);
    w.wo = normal_tensor(rng, d * d, in_scale * depth_scale);
    w.mlp_norm.assign(d, 1.0f);
    w.w_up = normal_tensor(rng, f * d, in_scale);
    w.w_down = normal_tensor(rng, d * f, down_scale);
    m.layers_.push_back(std::move(w));
  }
  m.final_norm_.assign(d, 1.0f);
  return m;
}

Model Model::from_tensors(const ModelConfig& config, std::vector<float> embedding,
                          std::vector<LayerWeights> layers, std::vector<float> final_norm) {
  config.validate();
  const std::size_t d = config.width();
  const std::size_t f = d * config.ffn_multiplier;
  auto expect = [](const std::vector<float>& t, std::size_t n, const char* what) {
    if (t.size() != n) throw ValidationError(std::string("tensor size mismatch: ") + what);
  };
  expect(embedding, static_cast<std::size_t>(config.vocab_size) * d, "embedding");
  if (layers.size() != static_cast<std::size_t>(config.num_layers)) {
    throw ValidationError("tensor size mismatch: layer count");
  }
  for (const auto& w : layers) {
    expect(w.attn_norm, d, "attn_norm");
    expect(w.wq, d * d, "wq");
    expect(w.wk, d * d, "wk");
    expect(w.wv, d * d, "wv");
    expect(w.wo, d * d, "wo");
    expect(w.mlp_norm, d, "mlp_norm");
    expect(w.w_up, f * d, "w_up");
    expect(w.w_down, d * f, "w_down");
  }
  expect(final_norm, d, "final_norm");
  Model m;
  m.config_ = config;
  m.embedding_ = std::move(embedding);
  m.layers_ = std::move(layers);
  m.final_norm_ = std::move(final_norm);
  return m;
}

std::vector<NamedTensor> Model::tensors() const {
  const std::size_t d = width();
  const std::size_t f = ffn_width();
  std::vector<NamedTensor> out;
  out.push_back({"embedding", {static_cast<std::size_t>(config_.vocab_size), d}, &embedding_});
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::string p = "layers." + std::to_string(l) + ".";
    const LayerWeights& w = layers_[l];
    out.push_back({p + "attn_norm", {d}, &w.attn_norm});
    out.push_back({p + "wq", {d, d}, &w.wq});
    out.push_back({p + "wk", {d, d}, &w.wk});
    out.push_back({p + "wv", {d, d}, &w.wv});
    out.push_back({p + "wo", {d, d}, &w.wo});
    out.push_back({p + "mlp_norm", {d}, &w.mlp_norm});
    out.push_back({p + "w_up", {f, d}, &w.w_up});
    out.push_back({p + "w_down", {d, f}, &w.w_down});
  }
  out.push_back({"final_norm", {d}, &final_norm_});
  return out;
}

std::uint64_t Model::checksum() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const NamedTensor& t : tensors()) fnv_mix(h, *t.data);
  return h;
}

// ---------------------------------------------------------------------------
// Forward passes

namespace {

constexpr float kNormEps = 1e-5f;

// Rotates consecutive (even, odd) pairs of every head by position * theta_i,
// theta_i = base^(-2i / head_dim).
void apply_rotary(float* vec, int heads, int head_dim, int position, double base) {
  const int half = head_dim / 2;
  for (int i = 0; i < half; ++i) {
    const double theta = std::pow(base, -2.0 * i / head_dim);
    const double angle = static_cast<double>(position) * theta;
    const float c = static_cast<float>(std::cos(angle));
    const float s = static_cast<float>(std::sin(angle));
    for (int h = 0; h < heads; ++h) {
      float* pair = vec + h * head_dim + 2 * i;
      const float x0 = pair[0];
      const float x1 = pair[1];
      pair[0] = x0 * c - x1 * s;
      pair[1] = x0 * s + x1 * c;
    }
  }
}

struct KVRef {
  const float* key;
  const float* value;
};

// Softmax attention of one query against `items`, visited in the given order.
void attend(const simd::KernelTable& kt, int heads, int head_dim, const float* q,
            std::span<const KVRef> items, float* out, std::vector<float>& scores) {
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  scores.resize(items.size());
  for (int h = 0; h < heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * head_dim;
    float max_score = -INFINITY;
    for (std::size_t j = 0; j < items.size(); ++j) {
      scores[j] = kt.dot(q + off, items[j].key + off, head_dim) * scale;
      max_score = std::max(max_score, scores[j]);
    }
    float total = 0.0f;
    for (std::size_t j = 0; j < items.size(); ++j) {
      scores[j] = std::exp(scores[j] - max_score);
      total += scores[j];
    }
    float* o = out + off;
    std::fill(o, o + head_dim, 0.0f);
    for (std::size_t j = 0; j < items.size(); ++j) {
      kt.axpy(scores[j] / total, items[j].value + off, o, head_dim);
    }
  }
}

// Per-token scratch buffers sized for one model.
struct Scratch {
  std::vector<float> h, q, k, v, attn, proj, up;
  std::vector<float> scores;
  std::vector<KVRef> items;

  explicit Scratch(const Model& m)
      : h(m.width()), q(m.width()), k(m.width()), v(m.width()), attn(m.width()),
        proj(m.width()), up(m.ffn_width()) {}
};

void qkv(const simd::KernelTable& kt, const Model& m, const LayerWeights& w, const float* x,
         int position, Scratch& s) {
  const std::size_t d = m.width();
  const ModelConfig& c = m.config();
  kt.rmsnorm(x, w.attn_norm.data(), s.h.data(), d, kNormEps);
  kt.matvec(w.wq.data(), s.h.data(), s.q.data(), d, d);
  kt.matvec(w.wk.data(), s.h.data(), s.k.data(), d, d);
  kt.matvec(w.wv.data(), s.h.data(), s.v.data(), d, d);
  apply_rotary(s.q.data(), c.num_heads, c.head_dim, position, c.rotary_base);
  apply_rotary(s.k.data(), c.num_heads, c.head_dim, position, c.rotary_base);
}

// Residual update after attention output is in s.attn: x += Wo attn, then MLP.
void finish_layer(const simd::KernelTable& kt, const Model& m, const LayerWeights& w,
                  float* x, Scratch& s) {
  const std::size_t d = m.width();
  const std::size_t f = m.ffn_width();
  kt.matvec(w.wo.data(), s.attn.data(), s.proj.data(), d, d);
  for (std::size_t i = 0; i < d; ++i) x[i] += s.proj[i];
  kt.rmsnorm(x, w.mlp_norm.data(), s.h.data(), d, kNormEps);
  kt.matvec(w.w_up.data(), s.h.data(), s.up.data(), f, d);
  for (float& u : s.up) u = u / (1.0f + std::exp(-u));
  kt.matvec(w.w_down.data(), s.up.data(), s.proj.data(), d, f);
  for (std::size_t i = 0; i < d; ++i) x[i] += s.proj[i];
}

void head_logits(const simd::KernelTable& kt, const Model& m, const float* x, float* out,
                 Scratch& s) {
  const std::size_t d = m.width();
  kt.rmsnorm(x, m.final_norm().data(), s.h.data(), d, kNormEps);
  kt.matvec(m.embedding().data(), s.h.data(), out, m.config().vocab_size, d);
  const float scale = 1.0f / std::sqrt(static_cast<float>(d));
  for (int i = 0; i < m.config().vocab_size; ++i) out[i] *= scale;
}

void check_token(const Model& m, TokenId t) {
  if (t < 0 || t >= m.config().vocab_size) {
    throw ValidationError("token id " + std::to_string(t) + " outside vocabulary");
  }
}

// Attention visiting order for an incremental query: cache indices plus the
// query itself (`self_index`), ascending by (position, index).
struct OrderKey {
  int position;
  std::size_t index;
  friend auto operator<=>(const OrderKey&, const OrderKey&) = default;
};

std::vector<std::size_t> visiting_order(const KVCache& cache,
                                        std::span<const std::size_t> visible,
                                        std::size_t self_index, int self_position) {
  std::vector<OrderKey> keys;
  keys.reserve(visible.size() + 1);
  for (std::size_t idx : visible) keys.push_back({cache.entries()[idx].position, idx});
  keys.push_back({self_position, self_index});
  std::sort(keys.begin(), keys.end());
  std::vector<std::size_t> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(k.index);
  return out;
}

// Runs one token through the stack against `cache`. When `sink` is non-null
// (and is `cache` itself) the token's keys/values are appended to it.
void run_token(const Model& m, const KVCache& cache, KVCache* sink, const NewToken& tok,
               std::span<const std::size_t> visible, float* logits_out) {
  const bool append = sink != nullptr;
  const simd::KernelTable& kt = simd::active_kernels();
  const std::size_t d = m.width();
  const ModelConfig& c = m.config();
  Scratch s(m);
  std::vector<float> x(m.embedding().begin() + static_cast<std::size_t>(tok.token) * d,
                       m.embedding().begin() + static_cast<std::size_t>(tok.token + 1) * d);

  std::size_t self_index = cache.size();
  if (append) self_index = CacheWriter::open_entry(*sink, {tok.coord, tok.position});
  const std::vector<std::size_t> order =
      visiting_order(cache, visible, self_index, tok.position);

  for (int l = 0; l < c.num_layers; ++l) {
    const LayerWeights& w = m.layers()[l];
    qkv(kt, m, w, x.data(), tok.position, s);
    if (append) CacheWriter::push(*sink, l, s.k, s.v);
    s.items.clear();
    for (std::size_t idx : order) {
      if (idx == self_index) {
        s.items.push_back({s.k.data(), s.v.data()});
      } else {
        s.items.push_back({cache.key(l, idx).data(), cache.value(l, idx).data()});
      }
    }
    attend(kt, c.num_heads, c.head_dim, s.q.data(), s.items, s.attn.data(), s.scores);
    finish_layer(kt, m, w, x.data(), s);
  }
  head_logits(kt, m, x.data(), logits_out, s);
}

}  // namespace

Logits forward_full(const Model& model, std::span<const TokenId> tokens,
                    std::span<const int> positions, const BitMatrix& mask) {
  const std::size_t n = tokens.size();
  if (positions.size() != n || mask.size() != n) {
    throw ValidationError("forward_full: tokens, positions and mask sizes disagree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    check_token(model, tokens[i]);
    if (!mask.get(i, i)) {
      throw ValidationError("forward_full: mask row " + std::to_string(i) +
                            " does not permit its own token");
    }
  }
  const simd::KernelTable& kt = simd::active_kernels();
  const ModelConfig& c = model.config();
  const std::size_t d = model.width();
  Scratch s(model);

  std::vector<float> x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(model.embedding().begin() + static_cast<std::size_t>(tokens[i]) * d, d,
                x.begin() + i * d);
  }
  std::vector<std::vector<std::size_t>> orders(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<OrderKey> keys;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask.get(i, j)) keys.push_back({positions[j], j});
    }
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) orders[i].push_back(k.index);
  }

  std::vector<float> keys(n * d);
  std::vector<float> values(n * d);
  std::vector<float> queries(n * d);
  for (int l = 0; l < c.num_layers; ++l) {
    const LayerWeights& w = model.layers()[l];
    for (std::size_t i = 0; i < n; ++i) {
      qkv(kt, model, w, x.data() + i * d, positions[i], s);
      std::copy(s.q.begin(), s.q.end(), queries.begin() + i * d);
      std::copy(s.k.begin(), s.k.end(), keys.begin() + i * d);
      std::copy(s.v.begin(), s.v.end(), values.begin() + i * d);
    }
    for (std::size_t i = 0; i < n; ++i) {
      s.items.clear();
      for (std::size_t j : orders[i]) s.items.push_back({&keys[j * d], &values[j * d]});
      attend(kt, c.num_heads, c.head_dim, &queries[i * d], s.items, s.attn.data(), s.scores);
      finish_layer(kt, model, w, x.data() + i * d, s);
    }
  }

  Logits out{n, static_cast<std::size_t>(c.vocab_size), {}};
  out.values.resize(n * out.vocab);
  for (std::size_t i = 0; i < n; ++i) {
    head_logits(kt, model, x.data() + i * d, out.values.data() + i * out.vocab, s);
  }
  return out;
}

Logits forward_incremental(const Model& model, KVCache& cache,
                           std::span<const NewToken> tokens,
                           std::span<const std::vector<TokenCoordinate>> visible) {
  if (visible.size() != tokens.size()) {
    throw ValidationError("forward_incremental: one visibility set per new token required");
  }
  if (cache.num_layers() != model.config().num_layers || cache.width() != model.width()) {
    throw ValidationError("forward_incremental: cache shape does not match the model");
  }
  // Validate everything before touching the cache.
  std::unordered_set<TokenCoordinate, TokenCoordinateHash> pending;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    check_token(model, tokens[i].token);
    if (cache.contains(tokens[i].coord) || pending.contains(tokens[i].coord)) {
      throw ValidationError("forward_incremental: duplicate coordinate " +
                            to_string(tokens[i].coord));
    }
    for (const TokenCoordinate& v : visible[i]) {
      if (v == tokens[i].coord) continue;
      if (!cache.contains(v) && !pending.contains(v)) {
        throw ValidationError("forward_incremental: " + to_string(tokens[i].coord) +
                              " references absent coordinate " + to_string(v));
      }
    }
    pending.insert(tokens[i].coord);
  }

  Logits out{tokens.size(), static_cast<std::size_t>(model.config().vocab_size), {}};
  out.values.resize(out.rows * out.vocab);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::vector<std::size_t> idx;
    idx.reserve(visible[i].size());
    for (const TokenCoordinate& v : visible[i]) {
      if (v == tokens[i].coord) continue;
      idx.push_back(*cache.find(v));
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    run_token(model, cache, &cache, tokens[i], idx, out.values.data() + i * out.vocab);
  }
  return out;
}

Logits forward_probe(const Model& model, const KVCache& cache, const NewToken& token,
                     std::span<const TokenCoordinate> visible) {
  check_token(model, token.token);
  std::vector<std::size_t> idx;
  for (const TokenCoordinate& v : visible) {
    if (v == token.coord) continue;
    auto found = cache.find(v);
    if (!found) {
      throw ValidationError("forward_probe: references absent coordinate " + to_string(v));
    }
    idx.push_back(*found);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  Logits out{1, static_cast<std::size_t>(model.config().vocab_size), {}};
  out.values.resize(out.vocab);
  run_token(model, cache, nullptr, token, idx, out.values.data());
  return out;
}

}  // namespace cothink::model
