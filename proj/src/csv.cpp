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

#include "cclf/csv.hpp"

#include <fstream>
#include <sstream>

#include "cclf/error.hpp"
#include "cclf/io.hpp"

namespace cclf::csv {

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool quoted = false;
  bool row_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    quoted = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || quoted) {
          throw ValueError("csv line " + std::to_string(line) +
                           ": stray quote in field");
        }
        in_quotes = quoted = row_started = true;
        break;
      case ',':
        row_started = true;
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_row();
        ++line;
        break;
      default:
        if (quoted) {
          throw ValueError("csv line " + std::to_string(line) +
                           ": text after closing quote");
        }
        row_started = true;
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw ValueError("csv line " + std::to_string(line) + ": unterminated quote");
  }
  if (row_started || !row.empty()) end_row();
  return rows;
}

std::vector<Row> read_file(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

std::string format_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += format_field(row[i]);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::vector<Row>& rows) {
  std::string text;
  for (const auto& row : rows) {
    text += format_row(row);
    text.push_back('\n');
  }
  write_file_atomic(path, text);
}

}  // namespace cclf::csv
