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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cclf {

enum class Partition { Train, Test };

struct CommentExample {
  std::string language;
  std::string category;
  std::string class_name;
  std::string sentence;
  int label = 0;
  Partition partition = Partition::Train;

  bool operator==(const CommentExample&) const = default;
};

struct CategoryDataset {
  std::string language;
  std::string category;
  std::vector<CommentExample> train;
  std::vector<CommentExample> validation;
  std::vector<CommentExample> test;
};

// CSV header names for each field.
struct ColumnMap {
  std::string class_name = "class";
  std::string sentence = "comment_sentence";
  std::string partition = "partition";
  std::string label = "instance_type";
};

struct CategoryKey {
  std::string language;
  std::string category;

  bool operator==(const CategoryKey&) const = default;
  auto operator<=>(const CategoryKey&) const = default;
};

// The 19 competition categories, lower-case, in report order.
const std::vector<CategoryKey>& competition_categories();
bool is_known_language(std::string_view language);
bool is_competition_category(const CategoryKey& key);

// <root>/<language>/<category>.csv
std::filesystem::path category_csv_path(const std::filesystem::path& root,
                                        const CategoryKey& key);

// Partition cells accept 0/train and 1/test. Missing columns raise
// SchemaError naming the column; bad cells raise ValueError with the
// 1-based data row number.
std::vector<CommentExample> load_category_csv(const std::filesystem::path& path,
                                              const ColumnMap& columns,
                                              std::string_view language,
                                              std::string_view category);

// Header then one row per example; partition written as 0/1.
void write_category_csv(const std::filesystem::path& path,
                        const std::vector<CommentExample>& examples,
                        const ColumnMap& columns);

// class_name </s> sentence
std::string build_input_finetune(std::string_view class_name,
                                 std::string_view sentence);

// lower(category) </s> sentence. Throws ContractError if category is empty.
std::string build_input_posttrain(std::string_view category,
                                  std::string_view sentence);

// Per label value with n_c examples, validation receives round(fraction * n_c)
// of them (half away from zero), chosen by a seeded shuffle. Both outputs keep
// the input order.
std::pair<std::vector<CommentExample>, std::vector<CommentExample>>
stratified_split(const std::vector<CommentExample>& examples,
                 double val_fraction, std::uint64_t seed);

// Validation count for one label class under the rounding rule.
std::size_t validation_count(std::size_t n, double val_fraction);

// Splits the train partition and keeps the test partition aside.
CategoryDataset make_dataset(std::string_view language, std::string_view category,
                             const std::vector<CommentExample>& examples,
                             double val_fraction, std::uint64_t seed);

struct LabeledText {
  std::string text;
  int label = 0;
};

// Every train-split example of every dataset in post-train form, shuffled.
std::vector<LabeledText> build_posttrain_corpus(
    const std::vector<CategoryDataset>& datasets, std::uint64_t seed);

// Union of validation splits in post-train form, in dataset order.
std::vector<LabeledText> build_posttrain_validation(
    const std::vector<CategoryDataset>& datasets);

std::vector<LabeledText> finetune_inputs(const std::vector<CommentExample>& examples);

// Separable synthetic corpus: a positive row carries its category's marker
// word, negatives never carry it. Rows draw filler words from a shared pool,
// so other categories' markers appear as distractors.
struct SyntheticSpec {
  std::vector<CategoryKey> categories;
  std::size_t rows_per_category = 400;
  double positive_fraction = 0.3;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

std::vector<CategoryKey> default_synthetic_categories();
std::string synthetic_marker(const CategoryKey& key);
std::vector<CommentExample> generate_synthetic(const SyntheticSpec& spec,
                                               const CategoryKey& key);

// Writes one CSV per category under root.
void write_synthetic_corpus(const std::filesystem::path& root,
                            const SyntheticSpec& spec, const ColumnMap& columns);

}  // namespace cclf
