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

#include "cclf/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "cclf/error.hpp"
#include "cclf/io.hpp"

namespace cclf {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

bool is_special(std::string_view piece) {
  return piece == kPadToken || piece == kUnkToken || piece == kClsToken ||
         piece == kSepToken;
}

}  // namespace

std::vector<std::string> pre_tokenize(std::string_view text) {
  std::vector<std::string> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = i;
    while (end < text.size() && !is_space(static_cast<unsigned char>(text[end]))) {
      ++end;
    }
    const std::string_view word = text.substr(i, end - i);
    if (word == kSepToken) {
      pieces.emplace_back(word);
    } else {
      std::size_t start = 0;
      for (std::size_t j = 1; j <= word.size(); ++j) {
        if (j == word.size() ||
            is_alnum(static_cast<unsigned char>(word[j])) !=
                is_alnum(static_cast<unsigned char>(word[j - 1]))) {
          pieces.emplace_back(word.substr(start, j - start));
          start = j;
        }
      }
    }
    i = end;
  }
  return pieces;
}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw ValueError("vocabulary token '" + tokens_[i] + "' repeated");
    }
  }
}

Vocab Vocab::build(std::span<const std::string> corpus, std::size_t max_size) {
  if (max_size < 5) throw ConfigError("vocabulary max_size must be >= 5");
  std::map<std::string, std::size_t> counts;
  for (const auto& text : corpus) {
    for (auto& piece : pre_tokenize(text)) {
      if (!is_special(piece)) ++counts[piece];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  // std::map iteration is already lexicographic; stable sort keeps it for ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens{std::string(kPadToken), std::string(kUnkToken),
                                  std::string(kClsToken), std::string(kSepToken)};
  for (auto& [token, count] : ranked) {
    if (tokens.size() >= max_size) break;
    tokens.push_back(token);
  }
  return Vocab(std::move(tokens));
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  if (tokens.size() < 4 || tokens[0] != kPadToken || tokens[1] != kUnkToken ||
      tokens[2] != kClsToken || tokens[3] != kSepToken) {
    throw CorruptionError("vocabulary " + path.string() +
                          " does not start with the special tokens");
  }
  return Vocab(std::move(tokens));
}

void Vocab::save(const std::filesystem::path& path) const {
  std::string text;
  for (const auto& t : tokens_) {
    text += t;
    text += '\n';
  }
  write_file_atomic(path, text);
}

TokenId Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ValueError("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::uint64_t Vocab::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<TokenId> encode(std::string_view text, const Vocab& vocab,
                            std::size_t max_len) {
  if (max_len < 2) throw ConfigError("encode: max_len must be >= 2");
  std::vector<TokenId> ids{kClsId};
  for (const auto& piece : pre_tokenize(text)) {
    if (ids.size() + 1 >= max_len) break;
    ids.push_back(vocab.id(piece));
  }
  ids.push_back(kSepId);
  return ids;
}

std::vector<std::string> decode(std::span<const TokenId> ids,
                                const Vocab& vocab) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(vocab.token(id));
  return out;
}

TokenBatch pad_batch(std::span<const std::vector<TokenId>> sequences) {
  if (sequences.empty()) throw ContractError("pad_batch: empty batch");
  TokenBatch batch;
  batch.batch = sequences.size();
  for (const auto& s : sequences) batch.length = std::max(batch.length, s.size());
  batch.ids.assign(batch.batch * batch.length, kPadId);
  batch.mask.assign(batch.batch * batch.length, 0);
  for (std::size_t b = 0; b < sequences.size(); ++b) {
    const auto& s = sequences[b];
    std::copy(s.begin(), s.end(), batch.ids.begin() + b * batch.length);
    std::fill_n(batch.mask.begin() + b * batch.length, s.size(), 1);
  }
  return batch;
}

}  // namespace cclf
