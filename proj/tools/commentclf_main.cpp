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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cclf/config.hpp"
#include "cclf/data.hpp"
#include "cclf/error.hpp"
#include "cclf/pipeline.hpp"

namespace {

constexpr int kUsageExit = 2;
constexpr int kFailureExit = 1;

cclf::CategoryKey checked_key(const std::string& language, const std::string& category) {
  if (!cclf::is_known_language(language)) {
    throw cclf::UsageError("unknown language '" + language + "' (java, python, pharo)");
  }
  cclf::CategoryKey key{language, category};
  if (!cclf::is_competition_category(key)) {
    throw cclf::UsageError("unknown category '" + category + "' for " + language);
  }
  return key;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code comment classification pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::string config_path;
  bool no_posttrain = false;
  bool no_hsum = false;
  std::string data_root;
  std::string output_dir;
  std::optional<double> max_avg_runtime;
  app.add_option("--seed", seed, "Random seed (default 0)");
  app.add_option("--config", config_path, "Config file of key = value lines");
  app.add_flag("--no-posttrain", no_posttrain, "Skip domain post-training");
  app.add_flag("--no-hsum", no_hsum, "Use the last-layer head instead of HSUM");
  app.add_option("--data-root", data_root, "Directory holding <language>/<category>.csv");
  app.add_option("--output-dir", output_dir, "Directory for artifacts (default runs)");
  app.add_option("--max-avg-runtime", max_avg_runtime, "Runtime budget for the score");

  auto* split = app.add_subcommand("split", "Build stratified splits and the vocabulary");
  auto* posttrain = app.add_subcommand("posttrain", "Post-train on the pooled corpus");
  auto* train = app.add_subcommand("train", "Two-stage fine-tuning of one category");
  std::string language, category;
  train->add_option("--language", language, "java, python or pharo")->required();
  train->add_option("--category", category, "Category name, lower case")->required();
  auto* train_all = app.add_subcommand("train-all", "Post-train, then fine-tune every category");
  auto* eval = app.add_subcommand("eval", "Evaluate final checkpoints and write the report");
  auto* predict = app.add_subcommand("predict", "Classify rows of a CSV file");
  std::string input;
  predict->add_option("--input", input, "CSV with class and sentence columns")->required();
  predict->add_option("--language", language, "java, python or pharo")->required();
  predict->add_option("--category", category, "Category name, lower case")->required();
  auto* report = app.add_subcommand("report", "Render report.txt from report.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    cclf::PipelineConfig cfg;
    if (!config_path.empty()) cclf::load_config_file(config_path, cfg);
    if (seed) cfg.seed = *seed;
    if (no_posttrain) cfg.posttrain_enabled = false;
    if (no_hsum) cfg.model.hsum_enabled = false;
    if (!data_root.empty()) cfg.data_root = data_root;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (max_avg_runtime) cfg.max_avg_runtime = *max_avg_runtime;
    cfg.finalize();

    std::optional<cclf::CategoryKey> key;
    if (train->parsed() || predict->parsed()) key = checked_key(language, category);

    cclf::Pipeline pipeline(cfg, &std::cerr);
    if (split->parsed()) {
      pipeline.split();
    } else if (posttrain->parsed()) {
      pipeline.posttrain();
    } else if (train->parsed()) {
      auto outcome = pipeline.train(*key);
      std::cout << outcome.checkpoint.string() << "\n";
    } else if (train_all->parsed()) {
      for (const auto& o : pipeline.train_all()) std::cout << o.checkpoint.string() << "\n";
    } else if (eval->parsed()) {
      std::cout << cclf::report_table(pipeline.eval());
    } else if (predict->parsed()) {
      pipeline.predict(*key, input, std::cout);
    } else if (report->parsed()) {
      std::cout << cclf::report_table(pipeline.report());
    }
    return 0;
  } catch (const cclf::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const cclf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailureExit;
  }
}
