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

#include "cclf/config.hpp"

#include <charconv>
#include <cstdio>

#include "cclf/error.hpp"
#include "cclf/io.hpp"

namespace cclf {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ConfigError("config " + key + ": '" + v + "' is not a non-negative integer");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ConfigError("config " + key + ": '" + v + "' is not a number");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("config " + key + ": '" + v + "' is not a boolean");
}

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string flag(bool b) { return b ? "true" : "false"; }

void set_train(TrainConfig& t, const std::string& field, const std::string& key,
               const std::string& v) {
  if (field == "learning_rate") t.learning_rate = to_double(key, v);
  else if (field == "batch_size") t.batch_size = to_uint(key, v);
  else if (field == "epochs") t.epochs = to_uint(key, v);
  else if (field == "eval_every_steps") t.eval_every_steps = to_uint(key, v);
  else if (field == "extra_steps") t.extra_steps = to_uint(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

void list_train(std::map<std::string, std::string>& out, const std::string& prefix,
                const TrainConfig& t) {
  out[prefix + "learning_rate"] = num(t.learning_rate);
  out[prefix + "batch_size"] = std::to_string(t.batch_size);
  out[prefix + "epochs"] = std::to_string(t.epochs);
  out[prefix + "eval_every_steps"] = std::to_string(t.eval_every_steps);
  out[prefix + "extra_steps"] = std::to_string(t.extra_steps);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    const std::string line = trim(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::vector<CategoryKey> parse_category_list(const std::string& text) {
  std::vector<CategoryKey> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    const auto slash = item.find('/');
    if (slash == std::string::npos) {
      throw ConfigError("category '" + item + "' is not language/category");
    }
    CategoryKey key{item.substr(0, slash), item.substr(slash + 1)};
    if (!is_competition_category(key)) {
      throw ConfigError("unknown category '" + item + "'");
    }
    out.push_back(key);
  }
  return out;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  auto& enc = model.encoder;
  if (key == "data_root") data_root = value;
  else if (key == "output_dir") output_dir = value;
  else if (key == "column_map.class") columns.class_name = value;
  else if (key == "column_map.sentence") columns.sentence = value;
  else if (key == "column_map.partition") columns.partition = value;
  else if (key == "column_map.label") columns.label = value;
  else if (key == "val_fraction") val_fraction = to_double(key, value);
  else if (key == "seed") seed = to_uint(key, value);
  else if (key == "categories") categories = parse_category_list(value);
  else if (key == "vocab_size") vocab_size = to_uint(key, value);
  else if (key == "model.d_model") enc.d_model = to_uint(key, value);
  else if (key == "model.n_layers") enc.n_layers = to_uint(key, value);
  else if (key == "model.n_heads") enc.n_heads = to_uint(key, value);
  else if (key == "model.d_ff") enc.d_ff = to_uint(key, value);
  else if (key == "model.max_len") enc.max_len = to_uint(key, value);
  else if (key == "model.dropout") enc.dropout_rate = to_double(key, value);
  else if (key == "model.hsum_depth") model.hsum_depth = to_uint(key, value);
  else if (key == "hsum_enabled") model.hsum_enabled = to_bool(key, value);
  else if (key == "posttrain_enabled") posttrain_enabled = to_bool(key, value);
  else if (key == "max_avg_runtime") max_avg_runtime = to_double(key, value);
  else if (key == "runtime_repetitions") runtime_repetitions = to_uint(key, value);
  else if (key.rfind("posttrain.", 0) == 0) set_train(posttrain, key.substr(10), key, value);
  else if (key.rfind("finetune.", 0) == 0) {
    const std::string field = key.substr(9);
    if (field == "epochs_java") finetune_java.epochs = to_uint(key, value);
    else if (field == "epochs_other") finetune_other.epochs = to_uint(key, value);
    else {
      set_train(finetune_java, field, key, value);
      set_train(finetune_other, field, key, value);
    }
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void PipelineConfig::finalize() {
  model.encoder.seed = seed;
  for (auto* t : {&posttrain, &finetune_java, &finetune_other}) {
    t->seed = seed;
    t->hsum_enabled = model.hsum_enabled;
    t->posttrain_enabled = posttrain_enabled;
    t->validate();
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val_fraction must be in (0, 1)");
  }
  if (vocab_size < 5) throw ConfigError("vocab_size must be >= 5");
  if (max_avg_runtime < 0.0) throw ConfigError("max_avg_runtime must be positive");
  // vocab_size is checked against the built vocabulary later.
  auto probe = model;
  probe.encoder.vocab_size = std::max<std::size_t>(probe.encoder.vocab_size, 4);
  probe.validate();
}

TrainConfig PipelineConfig::finetune_for(std::string_view language) const {
  return language == "java" ? finetune_java : finetune_other;
}

std::string PipelineConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["data_root"] = data_root.generic_string();
  kv["column_map.class"] = columns.class_name;
  kv["column_map.sentence"] = columns.sentence;
  kv["column_map.partition"] = columns.partition;
  kv["column_map.label"] = columns.label;
  kv["val_fraction"] = num(val_fraction);
  kv["seed"] = std::to_string(seed);
  std::string cats;
  for (const auto& c : categories) {
    if (!cats.empty()) cats += ',';
    cats += c.language + "/" + c.category;
  }
  kv["categories"] = cats;
  kv["vocab_size"] = std::to_string(vocab_size);
  const auto& enc = model.encoder;
  kv["model.d_model"] = std::to_string(enc.d_model);
  kv["model.n_layers"] = std::to_string(enc.n_layers);
  kv["model.n_heads"] = std::to_string(enc.n_heads);
  kv["model.d_ff"] = std::to_string(enc.d_ff);
  kv["model.max_len"] = std::to_string(enc.max_len);
  kv["model.dropout"] = num(enc.dropout_rate);
  kv["model.hsum_depth"] = std::to_string(model.hsum_depth);
  kv["hsum_enabled"] = flag(model.hsum_enabled);
  kv["posttrain_enabled"] = flag(posttrain_enabled);
  list_train(kv, "posttrain.", posttrain);
  list_train(kv, "finetune.", finetune_java);
  kv["finetune.epochs_java"] = std::to_string(finetune_java.epochs);
  kv["finetune.epochs_other"] = std::to_string(finetune_other.epochs);
  kv.erase("finetune.epochs");
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t PipelineConfig::hash() const { return fnv1a64(canonical()); }

void load_config_file(const std::filesystem::path& path, PipelineConfig& cfg) {
  for (const auto& [k, v] : parse_key_values(read_text_file(path))) cfg.set(k, v);
}

}  // namespace cclf
