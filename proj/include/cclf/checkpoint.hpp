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

#pragma once

// Checkpoint file layout:
//
//   CMTCKPT 1\n
//   <manifest bytes> <manifest fnv1a64 hex> <payload bytes> <payload fnv1a64 hex>\n
//   <manifest: JSON with model config, vocab hash, parameter names and shapes,
//    free-form metadata>
//   <payload: float32 little-endian, row-major, in manifest order>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclf/training.hpp"

namespace cclf {

struct CheckpointTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  ModelConfig model;
  std::uint64_t vocab_hash = 0;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<CheckpointTensor> tensors;
};

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

// Byte-identical output for identical inputs. Throws IoError naming the path.
void save_checkpoint(const Model& model, std::uint64_t vocab_hash,
                     const nlohmann::json& metadata,
                     const std::filesystem::path& path);

// Throws IoError, or CorruptionError on a bad header, truncation or hash
// mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Copies checkpoint values into the model. Throws ShapeError naming the
// first parameter whose name or shape differs.
void assign_parameters(Model& model, const Checkpoint& checkpoint);

// A model built from the stored config with the stored values.
Model model_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace cclf
