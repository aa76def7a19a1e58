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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cclf {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kClsId = 2;
inline constexpr TokenId kSepId = 3;

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kClsToken = "<s>";
inline constexpr std::string_view kSepToken = "</s>";

// Splits on whitespace, then at every boundary between ASCII alphanumeric and
// other bytes. A whitespace-delimited word equal to kSepToken stays whole.
std::vector<std::string> pre_tokenize(std::string_view text);

// Frozen token <-> id table. The first four ids are the special tokens.
class Vocab {
 public:
  // Frequency descending, ties lexicographically ascending, truncated so the
  // vocabulary (specials included) has at most max_size entries.
  static Vocab build(std::span<const std::string> corpus, std::size_t max_size);

  static Vocab load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return tokens_.size(); }
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // FNV-1a over the newline-joined token list.
  std::uint64_t hash() const;

 private:
  explicit Vocab(std::vector<std::string> tokens);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// [CLS] + ids + [SEP], truncated to at most max_len (SEP kept last).
std::vector<TokenId> encode(std::string_view text, const Vocab& vocab,
                            std::size_t max_len = 128);

std::vector<std::string> decode(std::span<const TokenId> ids,
                                const Vocab& vocab);

// Right-padded batch, row-major [batch x length]. mask is 1 at real tokens.
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;
};

TokenBatch pad_batch(std::span<const std::vector<TokenId>> sequences);

}  // namespace cclf
