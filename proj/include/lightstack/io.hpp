// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef LIGHTSTACK_IO_HPP_
#define LIGHTSTACK_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lightstack {

// Whole-file read; IoError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// Strict full-string parse; returns false on trailing garbage.
bool parse_double(std::string_view text, double& out);

std::vector<std::string_view> split_fields(std::string_view line, char sep);

}  // namespace lightstack

#endif  // LIGHTSTACK_IO_HPP_
