/* Copyright 2026 The commentclf Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cclf/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include "cclf/error.hpp"
#include "cclf/io.hpp"

namespace cclf {
namespace {

constexpr std::string_view kMagic = "CMTCKPT 1\n";

void append_le(std::string& out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

float read_le(const char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<float>(bits);
}

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& c) {
  const auto& e = c.encoder;
  return {{"vocab_size", e.vocab_size}, {"d_model", e.d_model},
          {"n_layers", e.n_layers},     {"n_heads", e.n_heads},
          {"d_ff", e.d_ff},             {"max_len", e.max_len},
          {"dropout", e.dropout_rate},  {"seed", e.seed},
          {"hsum_enabled", c.hsum_enabled}, {"hsum_depth", c.hsum_depth}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  auto& e = c.encoder;
  j.at("vocab_size").get_to(e.vocab_size);
  j.at("d_model").get_to(e.d_model);
  j.at("n_layers").get_to(e.n_layers);
  j.at("n_heads").get_to(e.n_heads);
  j.at("d_ff").get_to(e.d_ff);
  j.at("max_len").get_to(e.max_len);
  j.at("dropout").get_to(e.dropout_rate);
  j.at("seed").get_to(e.seed);
  j.at("hsum_enabled").get_to(c.hsum_enabled);
  j.at("hsum_depth").get_to(c.hsum_depth);
  return c;
}

void save_checkpoint(const Model& model, std::uint64_t vocab_hash,
                     const nlohmann::json& metadata,
                     const std::filesystem::path& path) {
  nlohmann::json params = nlohmann::json::array();
  std::string payload;
  for (const auto& p : model.parameters()) {
    params.push_back({{"name", p.name}, {"shape", p.tensor.shape()}});
    for (float v : p.tensor.data()) append_le(payload, v);
  }
  const nlohmann::json manifest{{"model", model_config_to_json(model.config())},
                                {"vocab_hash", hex64(vocab_hash)},
                                {"parameters", params},
                                {"metadata", metadata}};
  const std::string text = manifest.dump();
  std::string file(kMagic);
  file += std::to_string(text.size()) + " " + hex64(fnv1a64(text)) + " " +
          std::to_string(payload.size()) + " " + hex64(fnv1a64(payload)) + "\n";
  file += text;
  file += payload;
  write_file_atomic(path, file);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string file = read_text_file(path);
  const std::string where = "checkpoint " + path.string();
  if (file.compare(0, kMagic.size(), kMagic) != 0) {
    throw CorruptionError(where + ": bad magic");
  }
  const auto header_end = file.find('\n', kMagic.size());
  if (header_end == std::string::npos) throw CorruptionError(where + ": truncated header");
  std::istringstream header(file.substr(kMagic.size(), header_end - kMagic.size()));
  std::size_t manifest_len = 0, payload_len = 0;
  std::string manifest_hash, payload_hash;
  if (!(header >> manifest_len >> manifest_hash >> payload_len >> payload_hash)) {
    throw CorruptionError(where + ": malformed header");
  }
  const std::size_t body = header_end + 1;
  if (file.size() != body + manifest_len + payload_len) {
    throw CorruptionError(where + ": expected " +
                          std::to_string(body + manifest_len + payload_len) +
                          " bytes, found " + std::to_string(file.size()));
  }
  const std::string_view manifest_text(file.data() + body, manifest_len);
  const std::string_view payload(file.data() + body + manifest_len, payload_len);
  if (hex64(fnv1a64(manifest_text)) != manifest_hash) {
    throw CorruptionError(where + ": manifest hash mismatch");
  }
  if (hex64(fnv1a64(payload)) != payload_hash) {
    throw CorruptionError(where + ": payload hash mismatch");
  }

  Checkpoint ck;
  try {
    const auto manifest = nlohmann::json::parse(manifest_text);
    ck.model = model_config_from_json(manifest.at("model"));
    ck.vocab_hash = std::stoull(manifest.at("vocab_hash").get<std::string>(), nullptr, 16);
    ck.metadata = manifest.at("metadata");
    for (const auto& p : manifest.at("parameters")) {
      CheckpointTensor t;
      p.at("name").get_to(t.name);
      t.shape = p.at("shape").get<Shape>();
      ck.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(where + ": bad manifest: " + e.what());
  }

  std::size_t total = 0;
  for (const auto& t : ck.tensors) total += numel(t.shape);
  if (payload_len != 4 * total) {
    throw CorruptionError(where + ": payload holds " + std::to_string(payload_len) +
                          " bytes, manifest needs " + std::to_string(4 * total));
  }
  const char* p = payload.data();
  for (auto& t : ck.tensors) {
    t.values.resize(numel(t.shape));
    for (auto& v : t.values) {
      v = read_le(p);
      p += 4;
    }
  }
  return ck;
}

void assign_parameters(Model& model, const Checkpoint& checkpoint) {
  auto params = model.parameters();
  const std::size_t n = std::min(params.size(), checkpoint.tensors.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& src = checkpoint.tensors[i];
    auto& dst = params[i];
    if (src.name != dst.name || src.shape != dst.tensor.shape()) {
      throw ShapeError("parameter " + dst.name + " " + shape_string(dst.tensor.shape()) +
                       " does not match checkpoint " + src.name + " " +
                       shape_string(src.shape));
    }
  }
  if (params.size() != checkpoint.tensors.size()) {
    const auto& name = params.size() > n ? params[n].name : checkpoint.tensors[n].name;
    throw ShapeError("parameter " + name + " is missing on one side (model has " +
                     std::to_string(params.size()) + ", checkpoint has " +
                     std::to_string(checkpoint.tensors.size()) + ")");
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = params[i].tensor.mutable_data();
    std::copy(checkpoint.tensors[i].values.begin(), checkpoint.tensors[i].values.end(),
              dst.begin());
  }
}

Model model_from_checkpoint(const Checkpoint& checkpoint) {
  Model model(checkpoint.model);
  assign_parameters(model, checkpoint);
  return model;
}

}  // namespace cclf
