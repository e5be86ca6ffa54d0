// Copyright 2026 The Nanogrid P2P Authors. All rights reserved.
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

#ifndef NANOGRID_CSV_HPP_
#define NANOGRID_CSV_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace nanogrid {

// Header-first comma separated table. Cells are trimmed; quoting is not
// supported (none of the schemas here carry commas inside a field).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws ConfigError when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, const std::string& origin);

// Parses a full cell as a double; throws ConfigError naming the origin.
double parse_number(std::string_view cell, const std::string& origin);

// Shortest round-trippable text for a double ("%.17g" trimmed to the
// shortest representation that parses back to the same value).
std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header);

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((write_cell(cells, first)), ...);
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells);

 private:
  void write_cell(const std::string& s, bool& first) { sep(first); out_ << s; }
  void write_cell(const char* s, bool& first) { sep(first); out_ << s; }
  void write_cell(double v, bool& first) { sep(first); out_ << format_number(v); }
  void write_cell(int v, bool& first) { sep(first); out_ << v; }
  void write_cell(long v, bool& first) { sep(first); out_ << v; }
  void write_cell(std::size_t v, bool& first) { sep(first); out_ << v; }
  void sep(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }

  std::ofstream out_;
};

}  // namespace nanogrid

#endif  // NANOGRID_CSV_HPP_
