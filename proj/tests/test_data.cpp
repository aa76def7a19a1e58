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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "cclf/csv.hpp"
#include "cclf/data.hpp"
#include "cclf/error.hpp"
#include "cclf/io.hpp"
#include "cclf/tokenizer.hpp"

using namespace cclf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("cclf_test_data_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<CommentExample> labeled(std::size_t n, std::size_t positives) {
  std::vector<CommentExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    CommentExample ex;
    ex.language = "java";
    ex.category = "summary";
    ex.class_name = "C" + std::to_string(i);
    ex.sentence = "s" + std::to_string(i);
    ex.label = i < positives ? 1 : 0;
    out.push_back(ex);
  }
  return out;
}

std::size_t count_label(const std::vector<CommentExample>& xs, int label) {
  std::size_t n = 0;
  for (const auto& x : xs) n += x.label == label;
  return n;
}

}  // namespace

TEST_CASE("csv parsing follows RFC 4180") {
  auto rows = csv::parse("a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == csv::Row{"a", "b"});
  CHECK(rows[1] == csv::Row{"x, y", "he said \"hi\""});
  CHECK(rows[2] == csv::Row{"multi\nline", ""});
  CHECK(csv::parse("a,b") == std::vector<csv::Row>{{"a", "b"}});
  CHECK(csv::parse("").empty());
  CHECK_THROWS_AS(csv::parse("\"open"), ValueError);
  CHECK_THROWS_AS(csv::parse("ab\"c\n"), ValueError);
  CHECK_THROWS_AS(csv::parse("\"ab\"c\n"), ValueError);
}

TEST_CASE("csv field formatting round trips") {
  std::mt19937_64 rng(3);
  const std::string alphabet = "ab,\"\n\r x";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<csv::Row> rows;
    for (int r = 0; r < 3; ++r) {
      csv::Row row;
      for (int f = 0; f < 3; ++f) {
        std::string s;
        for (int i = len(rng); i > 0; --i) s.push_back(alphabet[pick(rng)]);
        row.push_back(s);
      }
      rows.push_back(row);
    }
    std::string text;
    for (const auto& row : rows) text += csv::format_row(row) + "\n";
    CHECK(csv::parse(text) == rows);
  }
}

TEST_CASE("load_category_csv maps columns") {
  auto dir = scratch("load");
  auto path = dir / "summary.csv";
  write_file_atomic(path,
                    "id,class,comment_sentence,partition,instance_type\n"
                    "1,Foo,\"a, b\",0,1\n"
                    "2,Bar,returns x,1,0\n");
  auto rows = load_category_csv(path, ColumnMap{}, "java", "summary");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].class_name == "Foo");
  CHECK(rows[0].sentence == "a, b");
  CHECK(rows[0].label == 1);
  CHECK(rows[0].partition == Partition::Train);
  CHECK(rows[1].class_name == "Bar");
  CHECK(rows[1].label == 0);
  CHECK(rows[1].partition == Partition::Test);
  CHECK(rows[1].language == "java");
  CHECK(rows[1].category == "summary");

  ColumnMap custom{"cls", "text", "split", "y"};
  write_file_atomic(path, "text,cls,y,split\nhello,K,1,test\n");
  auto c = load_category_csv(path, custom, "python", "usage");
  REQUIRE(c.size() == 1);
  CHECK(c[0].class_name == "K");
  CHECK(c[0].sentence == "hello");
  CHECK(c[0].partition == Partition::Test);
}

TEST_CASE("load_category_csv reports schema and value errors") {
  auto dir = scratch("errors");
  auto path = dir / "x.csv";
  write_file_atomic(path, "class,comment_sentence,partition\nFoo,bar,0\n");
  try {
    load_category_csv(path, ColumnMap{}, "java", "summary");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("instance_type") != std::string::npos);
  }
  write_file_atomic(path,
                    "class,comment_sentence,partition,instance_type\n"
                    "Foo,bar,0,1\nFoo,baz,0,2\n");
  try {
    load_category_csv(path, ColumnMap{}, "java", "summary");
    FAIL("expected ValueError");
  } catch (const ValueError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_category_csv(dir / "missing.csv", ColumnMap{}, "java", "x"),
                  IoError);
}

TEST_CASE("written examples load back identically") {
  auto dir = scratch("roundtrip");
  SyntheticSpec spec;
  spec.categories = default_synthetic_categories();
  spec.rows_per_category = 50;
  auto rows = generate_synthetic(spec, spec.categories[0]);
  rows[0].sentence = "quoted \"text\", with comma\nand newline";
  rows[1].class_name = "";
  write_category_csv(dir / "a.csv", rows, ColumnMap{});
  auto back = load_category_csv(dir / "a.csv", ColumnMap{}, rows[0].language,
                                rows[0].category);
  CHECK(back == rows);
}

TEST_CASE("input construction") {
  CHECK(build_input_finetune("Foo", "does X") == "Foo </s> does X");
  CHECK(pre_tokenize(build_input_finetune("", "does X")) ==
        std::vector<std::string>{"</s>", "does", "X"});
  CHECK(build_input_posttrain("summary", "returns the name") ==
        "summary </s> returns the name");
  CHECK(build_input_posttrain("Summary", "s") == "summary </s> s");
  CHECK(build_input_posttrain("usage", "s") != build_input_posttrain("summary", "s"));
  CHECK_THROWS_AS(build_input_posttrain("", "s"), ContractError);

  auto vocab = Vocab::build(std::vector<std::string>{"Foo does X summary"}, 50);
  auto ids = encode(build_input_finetune("Foo", "does X"), vocab);
  CHECK(ids == std::vector<TokenId>{kClsId, vocab.id("Foo"), kSepId, vocab.id("does"),
                                    vocab.id("X"), kSepId});
  auto pids = encode(build_input_posttrain("summary", "does X"), vocab);
  CHECK(pids[0] == kClsId);
  CHECK(pids[1] == vocab.id("summary"));
  CHECK(pids[2] == kSepId);
}

TEST_CASE("stratified split counts") {
  CHECK(validation_count(5, 0.1) == 1);
  CHECK(validation_count(4, 0.1) == 0);
  CHECK(validation_count(25, 0.1) == 3);
  CHECK(validation_count(15, 0.1) == 2);
  CHECK(validation_count(0, 0.1) == 0);

  auto xs = labeled(100, 30);
  auto [train, val] = stratified_split(xs, 0.1, 0);
  CHECK(count_label(val, 1) == 3);
  CHECK(count_label(val, 0) == 7);
  CHECK(train.size() == 90);

  auto [train2, val2] = stratified_split(xs, 0.1, 0);
  CHECK(val2 == val);
  auto [train3, val3] = stratified_split(xs, 0.1, 1);
  CHECK(val3 != val);

  std::set<std::string> seen;
  for (const auto& x : train) seen.insert(x.sentence);
  for (const auto& x : val) CHECK(seen.count(x.sentence) == 0);

  auto all_neg = labeled(20, 0);
  auto [t4, v4] = stratified_split(all_neg, 0.1, 0);
  CHECK(v4.size() == 2);
  CHECK_THROWS_AS(stratified_split(xs, 0.0, 0), ContractError);
  CHECK_THROWS_AS(stratified_split(xs, 1.0, 0), ContractError);
}

TEST_CASE("post-train corpus conservation and leakage") {
  std::vector<CategoryDataset> sets;
  for (std::string cat : {"summary", "usage"}) {
    std::vector<CommentExample> rows;
    for (int i = 0; i < 4; ++i) {
      CommentExample ex;
      ex.language = "java";
      ex.category = cat;
      ex.sentence = cat + std::to_string(i);
      ex.label = i % 2;
      rows.push_back(ex);
    }
    CategoryDataset ds;
    ds.language = "java";
    ds.category = cat;
    ds.train = rows;
    sets.push_back(ds);
  }
  CHECK(build_posttrain_corpus(sets, 0).size() == 8);

  SyntheticSpec spec;
  spec.categories = default_synthetic_categories();
  spec.rows_per_category = 120;
  std::vector<CategoryDataset> synth;
  std::size_t train_total = 0;
  std::set<std::string> held_out;
  for (const auto& key : spec.categories) {
    auto ds = make_dataset(key.language, key.category, generate_synthetic(spec, key), 0.1, 0);
    train_total += ds.train.size();
    for (const auto& x : ds.validation)
      held_out.insert(build_input_posttrain(x.category, x.sentence));
    for (const auto& x : ds.test)
      held_out.insert(build_input_posttrain(x.category, x.sentence));
    synth.push_back(ds);
  }
  auto corpus = build_posttrain_corpus(synth, 0);
  CHECK(corpus.size() == train_total);
  std::set<std::string> train_texts;
  for (const auto& ds : synth)
    for (const auto& x : ds.train) train_texts.insert(build_input_posttrain(x.category, x.sentence));
  for (const auto& item : corpus) {
    CHECK(train_texts.count(item.text) == 1);
  }
  auto again = build_posttrain_corpus(synth, 0);
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(again[i].text == corpus[i].text);
}

TEST_CASE("synthetic corpus is separable by marker") {
  SyntheticSpec spec;
  spec.categories = default_synthetic_categories();
  for (const auto& key : spec.categories) {
    auto rows = generate_synthetic(spec, key);
    CHECK(rows.size() == 400);
    const auto marker = synthetic_marker(key);
    std::size_t tests = 0;
    for (const auto& r : rows) {
      const bool has = r.sentence.find(marker) != std::string::npos;
      CHECK(has == (r.label == 1));
      tests += r.partition == Partition::Test;
    }
    CHECK(tests == 80);
  }
}

TEST_CASE("category registry") {
  CHECK(competition_categories().size() == 19);
  std::size_t java = 0, python = 0, pharo = 0;
  for (const auto& k : competition_categories()) {
    java += k.language == "java";
    python += k.language == "python";
    pharo += k.language == "pharo";
  }
  CHECK(java == 7);
  CHECK(python == 5);
  CHECK(pharo == 7);
  CHECK(is_competition_category({"python", "parameters"}));
  CHECK_FALSE(is_competition_category({"python", "pointer"}));
  CHECK(category_csv_path("root", {"java", "summary"}) == fs::path("root/java/summary.csv"));
}
