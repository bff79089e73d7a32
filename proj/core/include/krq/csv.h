// Copyright 2026 The krq Authors.
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

#ifndef KRQ_CSV_H_
#define KRQ_CSV_H_

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace krq {

// Shortest decimal form that round-trips to the same double.
std::string FormatDouble(double value);

// Quotes a field if it contains a comma, quote or newline.
std::string EscapeCsvField(std::string_view field);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& Field(std::string_view text);
  CsvWriter& Field(double value);
  CsvWriter& Field(long long value);
  CsvWriter& Field(unsigned long long value);
  CsvWriter& Field(int value) { return Field(static_cast<long long>(value)); }
  CsvWriter& Field(std::size_t value) { return Field(static_cast<unsigned long long>(value)); }
  void EndRow();

 private:
  void Separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws IoError if absent.
  std::size_t Column(std::string_view name) const;
};

CsvTable ReadCsv(const std::filesystem::path& path);

}  // namespace krq

#endif  // KRQ_CSV_H_
