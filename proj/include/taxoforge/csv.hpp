// Copyright 2026 The Taxoforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace taxoforge {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF. Blank lines are
// dropped. Throws Error(kParseError) on an unterminated quote.
std::vector<CsvRecord> parse_csv(std::string_view text);

std::string csv_field(std::string_view value);
std::string csv_row(std::span<const std::string> fields);

/// Shortest round-trip decimal form; deterministic across runs.
std::string format_real(double value);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace taxoforge
