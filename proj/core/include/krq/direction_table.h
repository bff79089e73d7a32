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

#ifndef KRQ_DIRECTION_TABLE_H_
#define KRQ_DIRECTION_TABLE_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string_view>
#include <vector>

namespace krq {

// Generator columns of a base-2 Sobol' sequence with 32-digit precision.
//
// Column j (0-based) of every dimension has its leading bit at position
// 31 - j, so the generator matrices are upper unit-triangular. Dimension 1
// is the van der Corput sequence; dimensions >= 2 are built from primitive
// polynomials and initial direction numbers in the Joe-Kuo text format
//
//   d s a m_1 ... m_s
//
// one line per dimension, optionally preceded by a header line.
class DirectionTable {
 public:
  static constexpr int kBits = 32;

  // Parses at most `max_dims` dimensions (0 means all lines available).
  static DirectionTable Parse(std::istream& in, int max_dims = 0);
  static DirectionTable Parse(std::string_view text, int max_dims = 0);
  static DirectionTable FromFile(const std::filesystem::path& path, int max_dims = 0);

  // The compiled-in new-joe-kuo-6.21201 table.
  static const DirectionTable& Bundled();

  int max_dims() const { return max_dims_; }

  // `dim` is 1-based. Throws UnsupportedDimensionError beyond max_dims().
  std::span<const uint32_t, kBits> columns(int dim) const;

 private:
  DirectionTable() = default;
  void AppendDimension(int s, uint32_t a, std::span<const uint32_t> m);

  int max_dims_ = 0;
  std::vector<uint32_t> columns_;
};

}  // namespace krq

#endif  // KRQ_DIRECTION_TABLE_H_
