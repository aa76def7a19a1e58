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

// Pipeline configuration read from a plain-text file of `key = value` lines.
// Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cclf/classifier.hpp"
#include "cclf/data.hpp"
#include "cclf/training.hpp"

namespace cclf {

struct PipelineConfig {
  std::filesystem::path data_root = "data";
  std::filesystem::path output_dir = "runs";
  ColumnMap columns;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  // Empty: every competition category with a CSV under data_root.
  std::vector<CategoryKey> categories;

  std::size_t vocab_size = 8000;
  ModelConfig model;

  TrainConfig posttrain = TrainConfig::posttrain_defaults();
  TrainConfig finetune_java = TrainConfig::finetune_defaults("java");
  TrainConfig finetune_other = TrainConfig::finetune_defaults("python");

  bool posttrain_enabled = true;
  // Budget for the submission score; 0 means unset.
  double max_avg_runtime = 0.0;
  // 0 skips timing and records a runtime of 0.
  std::size_t runtime_repetitions = 3;

  // Throws ConfigError for an unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);

  // Propagates seed and toggles into the nested configs, then validates.
  void finalize();

  TrainConfig finetune_for(std::string_view language) const;

  // Canonical key = value listing of every setting, sorted by key.
  std::string canonical() const;
  // FNV-1a of canonical().
  std::uint64_t hash() const;
};

// Reads a config file into cfg (keys not present keep their values).
void load_config_file(const std::filesystem::path& path, PipelineConfig& cfg);

// Parses lines of `key = value`. Throws ConfigError with the line number.
std::map<std::string, std::string> parse_key_values(const std::string& text);

std::vector<CategoryKey> parse_category_list(const std::string& text);

}  // namespace cclf
