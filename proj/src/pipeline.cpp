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

#include "cclf/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "cclf/checkpoint.hpp"
#include "cclf/csv.hpp"
#include "cclf/error.hpp"
#include "cclf/io.hpp"

namespace cclf {
namespace fs = std::filesystem;

namespace {

std::string key_name(const CategoryKey& key) { return key.language + "_" + key.category; }

std::string key_label(const CategoryKey& key) { return key.language + "/" + key.category; }

nlohmann::json history_json(const std::vector<EvalRecord>& history) {
  auto out = nlohmann::json::array();
  for (const auto& r : history) {
    out.push_back({{"step", r.step},
                   {"precision", r.metrics.precision},
                   {"recall", r.metrics.recall},
                   {"f1", r.metrics.f1}});
  }
  return out;
}

EncodedSet concat(EncodedSet a, const EncodedSet& b) {
  a.texts.insert(a.texts.end(), b.texts.begin(), b.texts.end());
  a.ids.insert(a.ids.end(), b.ids.begin(), b.ids.end());
  a.labels.insert(a.labels.end(), b.labels.begin(), b.labels.end());
  return a;
}

std::ostream& null_stream() {
  static std::ostream sink(nullptr);
  return sink;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, std::ostream* log)
    : cfg_(std::move(cfg)), log_(log) {}

std::ostream& Pipeline::log() const { return log_ ? *log_ : null_stream(); }

fs::path Pipeline::vocab_path() const { return cfg_.output_dir / "vocab.txt"; }

fs::path Pipeline::split_path(const CategoryKey& key, std::string_view part) const {
  return cfg_.output_dir / "splits" / (key_name(key) + "_" + std::string(part) + ".csv");
}

fs::path Pipeline::posttrain_checkpoint() const { return cfg_.output_dir / "posttrain.ckpt"; }

fs::path Pipeline::category_manifest(const CategoryKey& key) const {
  return cfg_.output_dir / "manifests" / (key_name(key) + ".json");
}

fs::path Pipeline::checkpoint_path(const CategoryKey& key, std::size_t step) const {
  return cfg_.output_dir / "checkpoints" /
         (key_name(key) + "_step" + std::to_string(step) + ".ckpt");
}

ModelConfig Pipeline::model_config(std::size_t vocab_size) const {
  ModelConfig mc = cfg_.model;
  mc.encoder.vocab_size = vocab_size;
  mc.encoder.seed = cfg_.seed;
  return mc;
}

std::vector<CategoryKey> Pipeline::categories() const {
  if (!cfg_.categories.empty()) return cfg_.categories;
  std::vector<CategoryKey> found;
  for (const auto& key : competition_categories()) {
    if (fs::exists(category_csv_path(cfg_.data_root, key))) found.push_back(key);
  }
  if (found.empty()) {
    throw IoError("no category CSV found under " + cfg_.data_root.string() +
                  " (expected <language>/<category>.csv)");
  }
  return found;
}

nlohmann::json Pipeline::run_info() const {
  return {{"seed", cfg_.seed},
          {"config_hash", hex64(cfg_.hash())},
          {"config", parse_key_values(cfg_.canonical())},
          {"posttrain", cfg_.posttrain_enabled},
          {"hsum", cfg_.model.hsum_enabled}};
}

void Pipeline::write_manifest(const fs::path& path, const nlohmann::json& j) const {
  write_file_atomic(path, j.dump(2) + "\n");
}

void Pipeline::split() {
  std::vector<std::string> texts;
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& key : categories()) {
    const auto path = category_csv_path(cfg_.data_root, key);
    auto rows = load_category_csv(path, cfg_.columns, key.language, key.category);
    auto ds = make_dataset(key.language, key.category, rows, cfg_.val_fraction, cfg_.seed);
    write_category_csv(split_path(key, "train"), ds.train, cfg_.columns);
    write_category_csv(split_path(key, "validation"), ds.validation, cfg_.columns);
    write_category_csv(split_path(key, "test"), ds.test, cfg_.columns);
    for (const auto* part : {&ds.train, &ds.validation}) {
      for (const auto& ex : *part) {
        texts.push_back(build_input_finetune(ex.class_name, ex.sentence));
        texts.push_back(build_input_posttrain(ex.category, ex.sentence));
      }
    }
    counts[key_label(key)] = {{"train", ds.train.size()},
                              {"validation", ds.validation.size()},
                              {"test", ds.test.size()}};
    log() << "split " << key_label(key) << ": train=" << ds.train.size()
          << " validation=" << ds.validation.size() << " test=" << ds.test.size() << "\n";
  }
  auto vocab = Vocab::build(texts, cfg_.vocab_size);
  vocab.save(vocab_path());
  auto manifest = run_info();
  manifest["splits"] = counts;
  manifest["vocab_size"] = vocab.size();
  manifest["vocab_hash"] = hex64(vocab.hash());
  write_manifest(cfg_.output_dir / "manifests" / "split.json", manifest);
}

void Pipeline::ensure_splits() {
  bool ready = fs::exists(vocab_path());
  for (const auto& key : categories()) {
    for (auto part : {"train", "validation", "test"}) {
      ready = ready && fs::exists(split_path(key, part));
    }
  }
  if (!ready) split();
}

CategoryDataset Pipeline::load_split(const CategoryKey& key) const {
  CategoryDataset ds;
  ds.language = key.language;
  ds.category = key.category;
  ds.train = load_category_csv(split_path(key, "train"), cfg_.columns, key.language, key.category);
  ds.validation =
      load_category_csv(split_path(key, "validation"), cfg_.columns, key.language, key.category);
  ds.test = load_category_csv(split_path(key, "test"), cfg_.columns, key.language, key.category);
  return ds;
}

void Pipeline::posttrain() {
  ensure_splits();
  const auto vocab = Vocab::load(vocab_path());
  std::vector<CategoryDataset> sets;
  for (const auto& key : categories()) sets.push_back(load_split(key));
  const std::size_t max_len = cfg_.model.encoder.max_len;
  auto corpus = encode_set(build_posttrain_corpus(sets, cfg_.seed), vocab, max_len);
  auto validation = encode_set(build_posttrain_validation(sets), vocab, max_len);

  Model init(model_config(vocab.size()));
  SelectionResult result;
  log() << "posttrain: " << corpus.size() << " inputs, " << validation.size()
        << " pooled validation\n";
  Model best = train_posttrain(init, corpus, validation, cfg_.posttrain, {}, &result);
  for (const auto& r : result.history) {
    log() << "  step " << r.step << " f1=" << r.metrics.f1 << "\n";
  }

  auto meta = run_info();
  meta["stage"] = "posttrain";
  meta["best_step"] = result.optimal_step;
  meta["total_steps"] = result.total_steps;
  save_checkpoint(best, vocab.hash(), meta, posttrain_checkpoint());
  meta["history"] = history_json(result.history);
  meta["checkpoint"] = posttrain_checkpoint().filename().string();
  write_manifest(cfg_.output_dir / "manifests" / "posttrain.json", meta);
}

CategoryOutcome Pipeline::train(const CategoryKey& key) {
  ensure_splits();
  const auto vocab = Vocab::load(vocab_path());
  const auto model_cfg = model_config(vocab.size());
  Model init(model_cfg);
  if (cfg_.posttrain_enabled) {
    if (!fs::exists(posttrain_checkpoint())) posttrain();
    auto ck = load_checkpoint(posttrain_checkpoint());
    if (ck.vocab_hash != vocab.hash()) {
      throw Error("post-trained checkpoint was built with a different vocabulary; "
                  "rerun posttrain");
    }
    if (model_config_to_json(ck.model) != model_config_to_json(model_cfg)) {
      throw Error("post-trained checkpoint was built with a different model "
                  "configuration; rerun posttrain");
    }
    assign_parameters(init, ck);
  }

  const auto ds = load_split(key);
  const std::size_t max_len = model_cfg.encoder.max_len;
  auto train_set = encode_set(finetune_inputs(ds.train), vocab, max_len);
  auto validation = encode_set(finetune_inputs(ds.validation), vocab, max_len);
  const auto tcfg = cfg_.finetune_for(key.language);

  auto s1 = train_stage1(init, train_set, validation, tcfg);
  log() << "train " << key_label(key) << ": optimal_step=" << s1.optimal_step << " of "
        << s1.total_steps << "\n";
  Model final_model = train_stage2(init, concat(train_set, validation), tcfg, s1.optimal_step);

  CategoryOutcome outcome;
  outcome.key = key;
  outcome.optimal_step = s1.optimal_step;
  outcome.final_step = s1.optimal_step + tcfg.extra_steps;
  outcome.checkpoint = checkpoint_path(key, outcome.final_step);

  auto meta = run_info();
  meta["stage"] = "finetune";
  meta["language"] = key.language;
  meta["category"] = key.category;
  meta["optimal_step"] = outcome.optimal_step;
  meta["final_step"] = outcome.final_step;
  meta["extra_steps"] = tcfg.extra_steps;
  save_checkpoint(final_model, vocab.hash(), meta, outcome.checkpoint);

  // Drop checkpoints of earlier runs for this category.
  const std::string prefix = key_name(key) + "_step";
  for (const auto& entry : fs::directory_iterator(outcome.checkpoint.parent_path())) {
    const auto name = entry.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && entry.path() != outcome.checkpoint) {
      fs::remove(entry.path());
    }
  }

  meta["history"] = history_json(s1.history);
  meta["stage1_total_steps"] = s1.total_steps;
  meta["checkpoint"] = fs::relative(outcome.checkpoint, cfg_.output_dir).generic_string();
  meta["init"] = cfg_.posttrain_enabled ? "posttrain.ckpt" : "fresh";
  meta["vocab_hash"] = hex64(vocab.hash());
  write_manifest(category_manifest(key), meta);
  return outcome;
}

std::vector<CategoryOutcome> Pipeline::train_all() {
  split();
  if (cfg_.posttrain_enabled) posttrain();
  std::vector<CategoryOutcome> out;
  for (const auto& key : categories()) out.push_back(train(key));
  return out;
}

Report Pipeline::eval() {
  if (!(cfg_.max_avg_runtime > 0.0)) {
    throw UsageError("eval needs --max-avg-runtime (or max_avg_runtime in the config)");
  }
  const auto keys = categories();
  std::vector<std::string> missing;
  std::vector<fs::path> checkpoints;
  for (const auto& key : keys) {
    const auto manifest_path = category_manifest(key);
    fs::path ckpt;
    if (fs::exists(manifest_path)) {
      auto j = nlohmann::json::parse(read_text_file(manifest_path));
      ckpt = cfg_.output_dir / j.at("checkpoint").get<std::string>();
    }
    if (ckpt.empty() || !fs::exists(ckpt)) missing.push_back(key_label(key));
    checkpoints.push_back(ckpt);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw Error("no trained checkpoint for: " + names);
  }

  const auto vocab = Vocab::load(vocab_path());
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& key = keys[i];
    auto ck = load_checkpoint(checkpoints[i]);
    if (ck.vocab_hash != vocab.hash()) {
      throw Error("checkpoint " + checkpoints[i].string() + " uses a different vocabulary");
    }
    Model model = model_from_checkpoint(ck);
    const auto ds = load_split(key);
    auto test = encode_set(finetune_inputs(ds.test), vocab, model.config().encoder.max_len);
    const auto metrics = evaluate_on_validation(model, test);
    double runtime = 0.0;
    if (test.size() == 0) {
      log() << "warning: " << key_label(key) << " has an empty test split; runtime 0\n";
    } else if (cfg_.runtime_repetitions > 0) {
      runtime = measure_runtime(model, vocab, test.texts, cfg_.runtime_repetitions);
    }
    rows.push_back({key.language, key.category, metrics, runtime});
  }
  auto report = make_report(std::move(rows), cfg_.max_avg_runtime);
  if (report.submission.clamped) {
    log() << "warning: measured average runtime exceeds max_avg_runtime\n";
  }
  write_file_atomic(cfg_.output_dir / "report.csv", report_csv(report));
  write_file_atomic(cfg_.output_dir / "report.txt", report_table(report));
  auto meta = run_info();
  meta["max_avg_runtime"] = cfg_.max_avg_runtime;
  meta["runtime_repetitions"] = cfg_.runtime_repetitions;
  meta["submission_score"] = report.submission.score;
  meta["avg_f1"] = report.average.f1;
  write_manifest(cfg_.output_dir / "manifests" / "eval.json", meta);
  return report;
}

void Pipeline::predict(const CategoryKey& key, const fs::path& input, std::ostream& out) {
  const auto manifest_path = category_manifest(key);
  if (!fs::exists(manifest_path)) {
    throw Error("no trained checkpoint for " + key_label(key));
  }
  auto j = nlohmann::json::parse(read_text_file(manifest_path));
  auto ck = load_checkpoint(cfg_.output_dir / j.at("checkpoint").get<std::string>());
  Model model = model_from_checkpoint(ck);
  const auto vocab = Vocab::load(vocab_path());

  const auto rows = csv::read_file(input);
  if (rows.empty()) throw SchemaError(input.string() + ": missing header row");
  auto find = [&](const std::string& name) {
    const auto& h = rows.front();
    auto it = std::find(h.begin(), h.end(), name);
    if (it == h.end()) throw SchemaError(input.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - h.begin());
  };
  const auto ci = find(cfg_.columns.class_name);
  const auto si = find(cfg_.columns.sentence);
  std::vector<LabeledText> items;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    if (rows[r].size() <= std::max(ci, si)) {
      throw ValueError(input.string() + " row " + std::to_string(r) + ": too few fields");
    }
    items.push_back({build_input_finetune(rows[r][ci], rows[r][si]), 0});
  }
  auto set = encode_set(items, vocab, model.config().encoder.max_len);
  const auto preds = predict_set(model, set);
  out << csv::format_row({cfg_.columns.class_name, cfg_.columns.sentence, "prediction"}) << "\n";
  std::size_t k = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    out << csv::format_row({rows[r][ci], rows[r][si], std::to_string(preds[k++])}) << "\n";
  }
}

Report Pipeline::report() {
  if (!(cfg_.max_avg_runtime > 0.0)) {
    throw UsageError("report needs --max-avg-runtime (or max_avg_runtime in the config)");
  }
  const auto path = cfg_.output_dir / "report.csv";
  if (!fs::exists(path)) throw Error("no report at " + path.string() + "; run eval first");
  auto report = make_report(parse_report_csv(read_text_file(path)), cfg_.max_avg_runtime);
  write_file_atomic(cfg_.output_dir / "report.txt", report_table(report));
  return report;
}

}  // namespace cclf
