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

#include "krq/direction_table.h"

#include <fstream>
#include <sstream>
#include <string>

#include "krq/error.h"

namespace krq {
namespace internal {
extern const std::string_view kBundledDirectionNumbers;
}  // namespace internal

void DirectionTable::AppendDimension(int s, uint32_t a, std::span<const uint32_t> m) {
  uint32_t v[kBits];
  if (s == 0) {
    for (int j = 0; j < kBits; ++j) v[j] = 1u << (kBits - 1 - j);
  } else {
    for (int j = 0; j < kBits && j < s; ++j) v[j] = m[j] << (kBits - 1 - j);
    for (int j = s; j < kBits; ++j) {
      v[j] = v[j - s] ^ (v[j - s] >> s);
      for (int k = 1; k < s; ++k) {
        if ((a >> (s - 1 - k)) & 1u) v[j] ^= v[j - k];
      }
    }
  }
  columns_.insert(columns_.end(), v, v + kBits);
  ++max_dims_;
}

DirectionTable DirectionTable::Parse(std::istream& in, int max_dims) {
  DirectionTable table;
  table.AppendDimension(0, 0, {});
  std::string line;
  int line_no = 0;
  std::vector<uint32_t> m;
  while ((max_dims <= 0 || table.max_dims_ < max_dims) && std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    long long d = 0, s = 0, a = 0;
    if (!(fields >> d)) continue;  // header or blank line
    if (!(fields >> s >> a) || s < 1 || s > kBits || a < 0) {
      throw ConfigError("direction table line " + std::to_string(line_no) + ": malformed");
    }
    if (d != table.max_dims_ + 1) {
      throw ConfigError("direction table line " + std::to_string(line_no) +
                        ": expected dimension " + std::to_string(table.max_dims_ + 1));
    }
    m.assign(static_cast<std::size_t>(s), 0);
    for (long long k = 0; k < s; ++k) {
      long long mk = 0;
      if (!(fields >> mk) || mk <= 0 || (mk & 1) == 0 || mk >= (1LL << (k + 1))) {
        throw ConfigError("direction table line " + std::to_string(line_no) +
                          ": invalid direction number m_" + std::to_string(k + 1));
      }
      m[static_cast<std::size_t>(k)] = static_cast<uint32_t>(mk);
    }
    table.AppendDimension(static_cast<int>(s), static_cast<uint32_t>(a), m);
  }
  return table;
}

DirectionTable DirectionTable::Parse(std::string_view text, int max_dims) {
  std::istringstream in{std::string(text)};
  return Parse(in, max_dims);
}

DirectionTable DirectionTable::FromFile(const std::filesystem::path& path, int max_dims) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open direction table " + path.string());
  return Parse(in, max_dims);
}

const DirectionTable& DirectionTable::Bundled() {
  static const DirectionTable table = Parse(internal::kBundledDirectionNumbers);
  return table;
}

std::span<const uint32_t, DirectionTable::kBits> DirectionTable::columns(int dim) const {
  if (dim < 1 || dim > max_dims_) {
    throw UnsupportedDimensionError("Sobol dimension " + std::to_string(dim) +
                                    " outside supported range 1.." +
                                    std::to_string(max_dims_));
  }
  return std::span<const uint32_t, kBits>(
      columns_.data() + static_cast<std::size_t>(dim - 1) * kBits, kBits);
}

}  // namespace krq
