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

#include "krq/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "krq/error.h"

namespace krq {

std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string EscapeCsvField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (const auto& h : header) Field(h);
  EndRow();
}

void CsvWriter::Separator() {
  if (columns_ > 0 && in_row_ == columns_) {
    throw ShapeError("CSV row already has all " + std::to_string(columns_) + " fields");
  }
  if (in_row_ > 0) out_ << ',';
  ++in_row_;
}

CsvWriter& CsvWriter::Field(std::string_view text) {
  Separator();
  out_ << EscapeCsvField(text);
  return *this;
}

CsvWriter& CsvWriter::Field(double value) {
  Separator();
  out_ << FormatDouble(value);
  return *this;
}

CsvWriter& CsvWriter::Field(long long value) {
  Separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::Field(unsigned long long value) {
  Separator();
  out_ << value;
  return *this;
}

void CsvWriter::EndRow() {
  if (in_row_ != columns_) {
    throw ShapeError("CSV row has " + std::to_string(in_row_) + " fields, header has " +
                     std::to_string(columns_));
  }
  out_ << '\n';
  in_row_ = 0;
}

std::size_t CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw IoError("CSV has no column '" + std::string(name) + "'");
}

namespace {

// One record; quoted fields may span lines. Returns false at end of input.
bool ReadRecord(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  for (int ch = in.get(); ch != std::char_traits<char>::eof(); ch = in.get()) {
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"' && in.peek() == '"') {
        cur += '"';
        in.get();
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw IoError("CSV ends inside a quoted field");
  fields.push_back(std::move(cur));
  return true;
}

}  // namespace

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  if (!ReadRecord(in, table.header)) throw IoError("empty CSV " + path.string());
  std::vector<std::string> fields;
  while (ReadRecord(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    table.rows.push_back(fields);
  }
  return table;
}

}  // namespace krq
