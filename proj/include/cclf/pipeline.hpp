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

// Orchestration of the split / post-train / train / eval steps over an
// output directory:
//
//   vocab.txt
//   splits/<lang>_<cat>_{train,validation,test}.csv
//   posttrain.ckpt
//   checkpoints/<lang>_<cat>_step<N>.ckpt
//   manifests/{split,posttrain,<lang>_<cat>,eval}.json
//   report.csv, report.txt

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cclf/config.hpp"
#include "cclf/data.hpp"
#include "cclf/metrics.hpp"
#include "cclf/training.hpp"

namespace cclf {

struct CategoryOutcome {
  CategoryKey key;
  std::size_t optimal_step = 0;
  std::size_t final_step = 0;
  std::filesystem::path checkpoint;
};

class Pipeline {
 public:
  // cfg must already be finalized. log may be null.
  Pipeline(PipelineConfig cfg, std::ostream* log);

  const PipelineConfig& config() const { return cfg_; }

  // Configured categories, or every competition category with a CSV under
  // data_root. Throws IoError if none is found.
  std::vector<CategoryKey> categories() const;

  void split();
  void posttrain();
  CategoryOutcome train(const CategoryKey& key);
  std::vector<CategoryOutcome> train_all();

  // Evaluates every category's final checkpoint on its test split and writes
  // the report. Throws Error naming categories without a checkpoint, and
  // UsageError if max_avg_runtime is unset.
  Report eval();

  // Predictions for every row of a CSV holding the class and sentence
  // columns, written as CSV to out.
  void predict(const CategoryKey& key, const std::filesystem::path& input,
               std::ostream& out);

  // Re-renders the report from report.csv.
  Report report();

  std::filesystem::path vocab_path() const;
  std::filesystem::path split_path(const CategoryKey& key, std::string_view part) const;
  std::filesystem::path posttrain_checkpoint() const;
  std::filesystem::path category_manifest(const CategoryKey& key) const;
  std::filesystem::path checkpoint_path(const CategoryKey& key, std::size_t step) const;

  ModelConfig model_config(std::size_t vocab_size) const;

 private:
  void ensure_splits();
  CategoryDataset load_split(const CategoryKey& key) const;
  void write_manifest(const std::filesystem::path& path, const nlohmann::json& j) const;
  nlohmann::json run_info() const;
  std::ostream& log() const;

  PipelineConfig cfg_;
  std::ostream* log_;
};

}  // namespace cclf
