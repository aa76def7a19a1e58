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

#include "cclf/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "cclf/csv.hpp"
#include "cclf/error.hpp"
#include "cclf/io.hpp"
#include "cclf/numerics/random.hpp"
#include "cclf/tokenizer.hpp"

namespace cclf {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t column_index(const csv::Row& header, const std::string& name,
                         const std::filesystem::path& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw SchemaError(path.string() + ": missing column '" + name + "'");
}

}  // namespace

const std::vector<CategoryKey>& competition_categories() {
  static const std::vector<CategoryKey> keys{
      {"java", "deprecation"},
      {"java", "pointer"},
      {"java", "summary"},
      {"java", "expand"},
      {"java", "ownership"},
      {"java", "rational"},
      {"java", "usage"},
      {"pharo", "classreferences"},
      {"pharo", "example"},
      {"pharo", "keyimplementationpoints"},
      {"pharo", "collaborators"},
      {"pharo", "intent"},
      {"pharo", "keymessages"},
      {"pharo", "responsibilities"},
      {"python", "developmentnotes"},
      {"python", "parameters"},
      {"python", "summary"},
      {"python", "expand"},
      {"python", "usage"},
  };
  return keys;
}

bool is_known_language(std::string_view language) {
  return language == "java" || language == "python" || language == "pharo";
}

bool is_competition_category(const CategoryKey& key) {
  const auto& keys = competition_categories();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::filesystem::path category_csv_path(const std::filesystem::path& root,
                                        const CategoryKey& key) {
  return root / key.language / (key.category + ".csv");
}

std::vector<CommentExample> load_category_csv(const std::filesystem::path& path,
                                              const ColumnMap& columns,
                                              std::string_view language,
                                              std::string_view category) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw SchemaError(path.string() + ": missing header row");
  const auto& header = rows.front();
  const std::size_t ci = column_index(header, columns.class_name, path);
  const std::size_t si = column_index(header, columns.sentence, path);
  const std::size_t pi = column_index(header, columns.partition, path);
  const std::size_t li = column_index(header, columns.label, path);
  const std::size_t needed = std::max({ci, si, pi, li}) + 1;

  std::vector<CommentExample> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path.string() + " row " + std::to_string(r);
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() < needed) {
      throw ValueError(where + ": expected at least " + std::to_string(needed) +
                       " fields, got " + std::to_string(row.size()));
    }
    CommentExample ex;
    ex.language = std::string(language);
    ex.category = std::string(category);
    ex.class_name = row[ci];
    ex.sentence = row[si];

    const std::string label = trim(row[li]);
    if (label == "0") {
      ex.label = 0;
    } else if (label == "1") {
      ex.label = 1;
    } else {
      throw ValueError(where + ": label '" + label + "' is not 0 or 1");
    }

    const std::string part = lower(trim(row[pi]));
    if (part == "0" || part == "train") {
      ex.partition = Partition::Train;
    } else if (part == "1" || part == "test") {
      ex.partition = Partition::Test;
    } else {
      throw ValueError(where + ": partition '" + part + "' is not 0/1/train/test");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

void write_category_csv(const std::filesystem::path& path,
                        const std::vector<CommentExample>& examples,
                        const ColumnMap& columns) {
  std::vector<csv::Row> rows;
  rows.reserve(examples.size() + 1);
  rows.push_back({columns.class_name, columns.sentence, columns.partition,
                  columns.label});
  for (const auto& ex : examples) {
    rows.push_back({ex.class_name, ex.sentence,
                    ex.partition == Partition::Test ? "1" : "0",
                    std::to_string(ex.label)});
  }
  csv::write_file(path, rows);
}

std::string build_input_finetune(std::string_view class_name,
                                 std::string_view sentence) {
  std::string out(class_name);
  out += ' ';
  out += kSepToken;
  out += ' ';
  out += sentence;
  return out;
}

std::string build_input_posttrain(std::string_view category,
                                  std::string_view sentence) {
  if (category.empty()) throw ContractError("post-train input needs a category");
  return build_input_finetune(lower(category), sentence);
}

std::size_t validation_count(std::size_t n, double val_fraction) {
  // The relative nudge keeps products like 0.1 * 25 from landing just below
  // the half.
  const double v = val_fraction * static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(v * (1.0 + 1e-12) + 0.5));
}

std::pair<std::vector<CommentExample>, std::vector<CommentExample>>
stratified_split(const std::vector<CommentExample>& examples,
                 double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ContractError("stratified_split: val_fraction must be in (0, 1)");
  }
  std::vector<char> to_validation(examples.size(), 0);
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (examples[i].label == label) members.push_back(i);
    }
    std::mt19937_64 rng(mix64(seed, 0x73706c6974ULL, static_cast<std::uint64_t>(label)));
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t take = validation_count(members.size(), val_fraction);
    for (std::size_t j = 0; j < take; ++j) to_validation[members[j]] = 1;
  }
  std::pair<std::vector<CommentExample>, std::vector<CommentExample>> out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (to_validation[i] ? out.second : out.first).push_back(examples[i]);
  }
  return out;
}

CategoryDataset make_dataset(std::string_view language, std::string_view category,
                             const std::vector<CommentExample>& examples,
                             double val_fraction, std::uint64_t seed) {
  CategoryDataset ds;
  ds.language = std::string(language);
  ds.category = std::string(category);
  std::vector<CommentExample> train_part;
  for (const auto& ex : examples) {
    (ex.partition == Partition::Test ? ds.test : train_part).push_back(ex);
  }
  auto [train, validation] = stratified_split(train_part, val_fraction, seed);
  ds.train = std::move(train);
  ds.validation = std::move(validation);
  return ds;
}

std::vector<LabeledText> build_posttrain_corpus(
    const std::vector<CategoryDataset>& datasets, std::uint64_t seed) {
  std::vector<LabeledText> corpus;
  for (const auto& ds : datasets) {
    for (const auto& ex : ds.train) {
      corpus.push_back({build_input_posttrain(ex.category, ex.sentence), ex.label});
    }
  }
  std::mt19937_64 rng(mix64(seed, 0x706f7374ULL));
  std::shuffle(corpus.begin(), corpus.end(), rng);
  return corpus;
}

std::vector<LabeledText> build_posttrain_validation(
    const std::vector<CategoryDataset>& datasets) {
  std::vector<LabeledText> out;
  for (const auto& ds : datasets) {
    for (const auto& ex : ds.validation) {
      out.push_back({build_input_posttrain(ex.category, ex.sentence), ex.label});
    }
  }
  return out;
}

std::vector<LabeledText> finetune_inputs(const std::vector<CommentExample>& examples) {
  std::vector<LabeledText> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back({build_input_finetune(ex.class_name, ex.sentence), ex.label});
  }
  return out;
}

std::vector<CategoryKey> default_synthetic_categories() {
  return {{"java", "summary"},   {"java", "usage"},
          {"python", "summary"}, {"python", "parameters"},
          {"pharo", "intent"},   {"pharo", "example"}};
}

std::string synthetic_marker(const CategoryKey& key) {
  return "mk" + key.language.substr(0, 2) + key.category;
}

std::vector<CommentExample> generate_synthetic(const SyntheticSpec& spec,
                                               const CategoryKey& key) {
  static constexpr std::array<std::string_view, 24> kFiller{
      "returns", "the",    "value",  "of",     "this",    "object",
      "list",    "index",  "when",   "called", "method",  "string",
      "buffer",  "given",  "name",   "uses",   "instance", "class",
      "default", "result", "param",  "self",   "array",   "count"};
  static constexpr std::array<std::string_view, 6> kClasses{
      "Parser", "Buffer", "Widget", "Logger", "Router", "Cache"};

  std::mt19937_64 rng(mix64(spec.seed, fnv1a64(key.language + "/" + key.category)));
  std::uniform_int_distribution<std::size_t> filler(0, kFiller.size() - 1);
  std::uniform_int_distribution<std::size_t> cls(0, kClasses.size() - 1);
  std::uniform_int_distribution<int> words(3, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::string marker = synthetic_marker(key);
  std::vector<std::string> distractors;
  for (const auto& other : spec.categories) {
    if (other != key) distractors.push_back(synthetic_marker(other));
  }

  const auto n = spec.rows_per_category;
  const auto positives = static_cast<std::size_t>(std::llround(spec.positive_fraction * n));
  const auto tests = static_cast<std::size_t>(std::llround(spec.test_fraction * n));
  std::vector<CommentExample> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CommentExample ex;
    ex.language = key.language;
    ex.category = key.category;
    ex.class_name = std::string(kClasses[cls(rng)]);
    ex.label = i < positives ? 1 : 0;
    std::vector<std::string> toks;
    const int count = words(rng);
    for (int w = 0; w < count; ++w) toks.emplace_back(kFiller[filler(rng)]);
    if (!distractors.empty() && unit(rng) < 0.3) {
      std::uniform_int_distribution<std::size_t> pick(0, distractors.size() - 1);
      toks.push_back(distractors[pick(rng)]);
    }
    if (ex.label == 1) toks.push_back(marker);
    std::shuffle(toks.begin(), toks.end(), rng);
    for (std::size_t w = 0; w < toks.size(); ++w) {
      if (w) ex.sentence += ' ';
      ex.sentence += toks[w];
    }
    rows.push_back(std::move(ex));
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].partition = i < tests ? Partition::Test : Partition::Train;
  }
  return rows;
}

void write_synthetic_corpus(const std::filesystem::path& root,
                            const SyntheticSpec& spec, const ColumnMap& columns) {
  for (const auto& key : spec.categories) {
    write_category_csv(category_csv_path(root, key), generate_synthetic(spec, key),
                       columns);
  }
}

}  // namespace cclf
