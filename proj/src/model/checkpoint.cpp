// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

#include "cothink/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cothink/errors.hpp"

namespace cothink::model {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "cothink-params";

void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFFU);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw RuntimeFailure("checkpoint: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_floats_le(std::ostream& out, const std::vector<float>& data) {
  std::vector<unsigned char> buf(data.size() * 4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(data[i]);
    for (int b = 0; b < 4; ++b) buf[i * 4 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<float> read_floats_le(std::istream& in, std::size_t count) {
  std::vector<unsigned char> buf(count * 4);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw RuntimeFailure("checkpoint: truncated tensor data");
  }
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(buf[i * 4 + b]) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

json config_to_json(const ModelConfig& c) {
  return {{"num_layers", c.num_layers},   {"num_heads", c.num_heads},
          {"head_dim", c.head_dim},       {"vocab_size", c.vocab_size},
          {"rotary_base", c.rotary_base}, {"seed", c.seed},
          {"ffn_multiplier", c.ffn_multiplier}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.num_layers = j.at("num_layers").get<int>();
  c.num_heads = j.at("num_heads").get<int>();
  c.head_dim = j.at("head_dim").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.rotary_base = j.at("rotary_base").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.ffn_multiplier = j.value("ffn_multiplier", 4);
  return c;
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  json header;
  header["format"] = kFormat;
  header["version"] = 1;
  header["config"] = config_to_json(model.config());
  header["tensors"] = json::array();
  const auto tensors = model.tensors();
  for (const NamedTensor& t : tensors) {
    header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("checkpoint: cannot open " + path.string() + " for writing");
  write_u64_le(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const NamedTensor& t : tensors) write_floats_le(out, *t.data);
  if (!out) throw RuntimeFailure("checkpoint: write failed for " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint: cannot open " + path.string());
  const std::uint64_t len = read_u64_le(in);
  if (len > (1ULL << 26)) throw RuntimeFailure("checkpoint: implausible header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw RuntimeFailure("checkpoint: truncated header");
  }
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw RuntimeFailure(std::string("checkpoint: malformed header: ") + e.what());
  }
  if (header.value("format", "") != kFormat) throw RuntimeFailure("checkpoint: unknown format");
  const ModelConfig config = config_from_json(header.at("config"));
  config.validate();

  // Shapes are authoritative; the reference model only supplies the expected
  // declaration order.
  std::vector<std::vector<float>> loaded;
  for (const json& t : header.at("tensors")) {
    std::size_t count = 1;
    for (const json& dim : t.at("shape")) count *= dim.get<std::size_t>();
    loaded.push_back(read_floats_le(in, count));
  }
  const std::size_t expected = 2 + 8 * static_cast<std::size_t>(config.num_layers);
  if (loaded.size() != expected) throw RuntimeFailure("checkpoint: unexpected tensor count");

  std::size_t next = 0;
  std::vector<float> embedding = std::move(loaded[next++]);
  std::vector<LayerWeights> layers(config.num_layers);
  for (LayerWeights& w : layers) {
    w.attn_norm = std::move(loaded[next++]);
    w.wq = std::move(loaded[next++]);
    w.wk = std::move(loaded[next++]);
    w.wv = std::move(loaded[next++]);
    w.wo = std::move(loaded[next++]);
    w.mlp_norm = std::move(loaded[next++]);
    w.w_up = std::move(loaded[next++]);
    w.w_down = std::move(loaded[next++]);
  }
  std::vector<float> final_norm = std::move(loaded[next++]);
  return Model::from_tensors(config, std::move(embedding), std::move(layers),
                             std::move(final_norm));
}

}  // namespace cothink::model
