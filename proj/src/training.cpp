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

#include "cclf/training.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "cclf/error.hpp"
#include "cclf/numerics/adam.hpp"
#include "cclf/numerics/kernels.hpp"
#include "cclf/numerics/ops.hpp"
#include "cclf/numerics/random.hpp"

namespace cclf {
namespace {

constexpr std::uint64_t kShuffleSalt = 0x73687566ULL;
constexpr std::uint64_t kDropoutSalt = 0x64726f70ULL;

TokenBatch gather(const EncodedSet& set, std::span<const std::size_t> indices,
                  std::vector<int>* labels) {
  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(indices.size());
  if (labels) labels->clear();
  for (auto i : indices) {
    seqs.push_back(set.ids[i]);
    if (labels) labels->push_back(set.labels[i]);
  }
  return pad_batch(seqs);
}

// Shared loop. Runs until max_steps optimizer steps or, when max_steps is 0,
// for cfg.epochs epochs. on_eval is called at every eval_every step and, if no
// evaluation happened, once at the final step.
void run_training(Model& model, const EncodedSet& data, const TrainConfig& cfg,
                  std::size_t max_steps, std::uint64_t stream,
                  const TrainHooks& hooks,
                  const std::function<void(std::size_t)>& on_eval) {
  if (data.size() == 0) throw ContractError("training set is empty");
  std::vector<Tensor<float>> tensors;
  for (auto& p : model.parameters()) tensors.push_back(p.tensor);
  Adam<float> optimizer(tensors, AdamHyperparams{cfg.learning_rate});

  const std::size_t n = data.size();
  const std::size_t per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total = max_steps ? max_steps : per_epoch * cfg.epochs;
  const double rate = model.config().encoder.dropout_rate;
  const std::uint64_t dropout_seed = mix64(cfg.seed, kDropoutSalt, stream);

  std::vector<std::size_t> order(n);
  std::vector<int> labels;
  std::size_t step = 0;
  bool evaluated = false;
  for (std::size_t epoch = 0; step < total; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix64(cfg.seed, kShuffleSalt, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n && step < total; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      if (hooks.on_batch) hooks.on_batch(data, idx);
      auto batch = gather(data, idx, &labels);

      optimizer.zero_grad();
      auto dropout = DropoutStream::training(rate, dropout_seed, step);
      auto out = model.forward(batch, dropout);
      auto loss = model.loss(out, labels);
      loss.check_finite("training loss");
      loss.backward();
      optimizer.step();
      ++step;
      if (hooks.on_step) hooks.on_step(step);

      if (on_eval && step % cfg.eval_every_steps == 0) {
        on_eval(step);
        evaluated = true;
      }
    }
  }
  if (on_eval && !evaluated) on_eval(step);
}

EvalRecord record(const Model& model, const EncodedSet& validation,
                  std::size_t step, const TrainHooks& hooks) {
  EvalRecord r{step, evaluate_on_validation(model, validation)};
  if (hooks.f1_override) r.metrics.f1 = hooks.f1_override(step, r.metrics.f1);
  return r;
}

}  // namespace

TrainConfig TrainConfig::posttrain_defaults() {
  TrainConfig c;
  c.learning_rate = 2e-5;
  c.batch_size = 64;
  c.epochs = 10;
  c.eval_every_steps = 500;
  return c;
}

TrainConfig TrainConfig::finetune_defaults(std::string_view language) {
  TrainConfig c;
  c.learning_rate = 1e-5;
  c.batch_size = 64;
  c.epochs = language == "java" ? 10 : 20;
  c.eval_every_steps = 50;
  c.extra_steps = 100;
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (eval_every_steps == 0) throw ConfigError("eval_every_steps must be positive");
}

EncodedSet encode_set(const std::vector<LabeledText>& items, const Vocab& vocab,
                      std::size_t max_len) {
  EncodedSet set;
  set.texts.reserve(items.size());
  set.ids.reserve(items.size());
  set.labels.reserve(items.size());
  for (const auto& item : items) {
    set.texts.push_back(item.text);
    set.ids.push_back(encode(item.text, vocab, max_len));
    set.labels.push_back(item.label);
  }
  return set;
}

std::size_t select_optimal_step(std::span<const EvalRecord> history) {
  if (history.empty()) throw ContractError("select_optimal_step: no evaluations");
  const EvalRecord* best = &history.front();
  for (const auto& r : history) {
    if (r.metrics.f1 > best->metrics.f1) best = &r;
  }
  return best->step;
}

std::vector<int> predict_set(const Model& model, const EncodedSet& set,
                             std::size_t batch_size) {
  std::vector<int> out;
  out.reserve(set.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    const std::size_t end = std::min(set.size(), start + batch_size);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    auto preds = model.predict(gather(set, idx, nullptr));
    out.insert(out.end(), preds.begin(), preds.end());
  }
  return out;
}

Metrics evaluate_on_validation(const Model& model, const EncodedSet& examples) {
  if (examples.size() == 0) return {};
  return category_metrics(confusion_counts(predict_set(model, examples), examples.labels));
}

Model train_posttrain(const Model& init, const EncodedSet& corpus,
                      const EncodedSet& validation, const TrainConfig& cfg,
                      const TrainHooks& hooks, SelectionResult* result) {
  cfg.validate();
  if (corpus.size() == 0) throw ContractError("post-training corpus is empty");
  if (validation.size() == 0) throw ContractError("post-training validation is empty");
  Model model = init.clone();
  Model best = init.clone();
  SelectionResult local;
  double best_f1 = -1.0;
  run_training(model, corpus, cfg, 0, 0x706f74ULL, hooks, [&](std::size_t step) {
    auto r = record(model, validation, step, hooks);
    local.history.push_back(r);
    if (r.metrics.f1 > best_f1) {
      best_f1 = r.metrics.f1;
      best = model.clone();
    }
    local.total_steps = step;
  });
  local.optimal_step = select_optimal_step(local.history);
  if (result) *result = std::move(local);
  return best;
}

SelectionResult train_stage1(const Model& init, const EncodedSet& train,
                             const EncodedSet& validation, const TrainConfig& cfg,
                             const TrainHooks& hooks) {
  cfg.validate();
  if (validation.size() == 0) throw ContractError("stage 1 needs a validation split");
  Model model = init.clone();
  SelectionResult result;
  run_training(model, train, cfg, 0, 1, hooks, [&](std::size_t step) {
    result.history.push_back(record(model, validation, step, hooks));
    result.total_steps = step;
  });
  result.optimal_step = select_optimal_step(result.history);
  return result;
}

Model train_stage2(const Model& init, const EncodedSet& full_train,
                   const TrainConfig& cfg, std::size_t optimal_step,
                   const TrainHooks& hooks) {
  cfg.validate();
  if (optimal_step == 0) throw ContractError("stage 2 needs optimal_step > 0");
  Model model = init.clone();
  run_training(model, full_train, cfg, optimal_step + cfg.extra_steps, 2, hooks, {});
  return model;
}

double mean_loss(const Model& model, const EncodedSet& set, std::size_t batch_size) {
  if (set.size() == 0) throw ContractError("mean_loss of an empty set");
  NoGradGuard no_grad;
  double total = 0.0;
  std::vector<std::size_t> idx;
  std::vector<int> labels;
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    const std::size_t end = std::min(set.size(), start + batch_size);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    auto batch = gather(set, idx, &labels);
    auto dropout = DropoutStream::inference();
    auto out = model.forward(batch, dropout);
    total += static_cast<double>(ops::cross_entropy_logits(out.logits, labels).item()) *
             static_cast<double>(idx.size());
  }
  return total / static_cast<double>(set.size());
}

double measure_runtime(const Model& model, const Vocab& vocab,
                       const std::vector<std::string>& texts, std::size_t repetitions) {
  if (repetitions == 0) throw ContractError("measure_runtime needs repetitions >= 1");
  if (texts.empty()) return 0.0;
  kernels::ScopedSingleThread single;
  const std::size_t max_len = model.config().encoder.max_len;
  std::vector<double> samples;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    EncodedSet set;
    for (const auto& t : texts) {
      set.ids.push_back(encode(t, vocab, max_len));
      set.labels.push_back(0);
    }
    auto preds = predict_set(model, set);
    const auto t1 = std::chrono::steady_clock::now();
    if (preds.size() != texts.size()) throw ContractError("prediction count mismatch");
    samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  return median(samples);
}

}  // namespace cclf
