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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cclf/classifier.hpp"
#include "cclf/data.hpp"
#include "cclf/metrics.hpp"
#include "cclf/tokenizer.hpp"

namespace cclf {

using Model = CommentClassifier<float>;

struct TrainConfig {
  double learning_rate = 1e-5;
  std::size_t batch_size = 64;
  std::size_t epochs = 10;
  std::size_t eval_every_steps = 50;
  std::size_t extra_steps = 100;
  std::uint64_t seed = 0;
  bool hsum_enabled = true;
  bool posttrain_enabled = true;

  static TrainConfig posttrain_defaults();
  // 10 epochs for Java, 20 for Python and Pharo.
  static TrainConfig finetune_defaults(std::string_view language);

  // Throws ConfigError naming the field.
  void validate() const;
};

// Tokenized texts with labels; texts are kept for inspection hooks.
struct EncodedSet {
  std::vector<std::string> texts;
  std::vector<std::vector<TokenId>> ids;
  std::vector<int> labels;

  std::size_t size() const { return ids.size(); }
};

EncodedSet encode_set(const std::vector<LabeledText>& items, const Vocab& vocab,
                      std::size_t max_len);

struct EvalRecord {
  std::size_t step = 0;
  Metrics metrics;
};

// Observation points for tests and audits. All optional.
struct TrainHooks {
  // After every optimizer step, with the 1-based step number.
  std::function<void(std::size_t step)> on_step;
  // Before each batch: the dataset and the example indices drawn into it.
  std::function<void(const EncodedSet&, std::span<const std::size_t>)> on_batch;
  // Replaces the validation F1 recorded at a step.
  std::function<double(std::size_t step, double f1)> f1_override;
};

struct SelectionResult {
  std::vector<EvalRecord> history;
  std::size_t optimal_step = 0;
  std::size_t total_steps = 0;
};

// Step of the highest F1; ties go to the earliest. Throws ContractError on an
// empty history.
std::size_t select_optimal_step(std::span<const EvalRecord> history);

// Predictions in inference mode, in input order.
std::vector<int> predict_set(const Model& model, const EncodedSet& set,
                             std::size_t batch_size = 64);

Metrics evaluate_on_validation(const Model& model, const EncodedSet& examples);

// Trains a copy of init on the corpus and returns the checkpoint with the best
// pooled-validation F1 (earliest on ties).
Model train_posttrain(const Model& init, const EncodedSet& corpus,
                      const EncodedSet& validation, const TrainConfig& cfg,
                      const TrainHooks& hooks = {},
                      SelectionResult* result = nullptr);

// Trains a copy of init on train and returns the step with the best
// validation F1. The trained weights are discarded.
SelectionResult train_stage1(const Model& init, const EncodedSet& train,
                             const EncodedSet& validation, const TrainConfig& cfg,
                             const TrainHooks& hooks = {});

// Retrains a copy of init on the full training data for exactly
// optimal_step + cfg.extra_steps optimizer steps.
Model train_stage2(const Model& init, const EncodedSet& full_train,
                   const TrainConfig& cfg, std::size_t optimal_step,
                   const TrainHooks& hooks = {});

// Mean cross-entropy loss of the model over a set, inference mode.
double mean_loss(const Model& model, const EncodedSet& set, std::size_t batch_size = 64);

// Wall-clock seconds of tokenizing and classifying every text, single
// threaded. Returns the median over repetitions; 0 for an empty set.
double measure_runtime(const Model& model, const Vocab& vocab,
                       const std::vector<std::string>& texts, std::size_t repetitions);

}  // namespace cclf
