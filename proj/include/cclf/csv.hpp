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

// RFC 4180 reader and writer. Fields may be quoted; quoted fields may hold
// commas, doubled quotes and line breaks. CRLF and LF record ends are both
// accepted on input; output uses LF.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cclf::csv {

using Row = std::vector<std::string>;

// Throws ValueError on an unterminated quote or stray quote in a bare field.
std::vector<Row> parse(std::string_view text);

std::vector<Row> read_file(const std::filesystem::path& path);

std::string format_field(std::string_view field);
std::string format_row(const Row& row);

// Writes to path.tmp, then renames over path.
void write_file(const std::filesystem::path& path, const std::vector<Row>& rows);

}  // namespace cclf::csv
