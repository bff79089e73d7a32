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

#include <gtest/gtest.h>

#include <bit>
#include <string>

#include "krq/error.h"

namespace krq {
namespace {

TEST(DirectionTableTest, BundledCoversPublishedDimensions) {
  EXPECT_EQ(DirectionTable::Bundled().max_dims(), 21201);
}

TEST(DirectionTableTest, DimensionOneIsVanDerCorput) {
  const auto v = DirectionTable::Bundled().columns(1);
  for (int j = 0; j < DirectionTable::kBits; ++j) EXPECT_EQ(v[j], 1u << (31 - j));
}

// Generator matrices are unit upper triangular: m_j is odd, so the lowest
// set bit of column j sits on the diagonal digit j.
TEST(DirectionTableTest, DiagonalDigitMatchesColumnIndex) {
  const auto& table = DirectionTable::Bundled();
  for (int dim = 1; dim <= table.max_dims(); ++dim) {
    const auto v = table.columns(dim);
    for (int j = 0; j < DirectionTable::kBits; ++j) {
      ASSERT_NE(v[j], 0u);
      ASSERT_EQ(std::countr_zero(v[j]), 31 - j) << "dim " << dim << " column " << j;
      ASSERT_LT(std::countl_zero(v[j]), j + 1);
    }
  }
}

TEST(DirectionTableTest, SecondDimensionRecurrence) {
  // Primitive polynomial x + 1 with m_1 = 1: m_k = 2 m_{k-1} ^ m_{k-1}.
  const auto v = DirectionTable::Bundled().columns(2);
  uint32_t m = 1;
  for (int k = 1; k <= DirectionTable::kBits; ++k) {
    if (k > 1) m = (m << 1) ^ m;
    EXPECT_EQ(v[k - 1], m << (32 - k)) << k;
  }
  EXPECT_EQ(v[0], 0x80000000u);
  EXPECT_EQ(v[1], 0xC0000000u);
  EXPECT_EQ(v[2], 0xA0000000u);
  EXPECT_EQ(v[3], 0xF0000000u);
  EXPECT_EQ(v[4], 0x88000000u);
}

TEST(DirectionTableTest, ParseHeaderedText) {
  const std::string text =
      "d s a m_i\n"
      "2 1 0 1\n"
      "3 2 1 1 3\n";
  const DirectionTable t = DirectionTable::Parse(std::string_view(text));
  EXPECT_EQ(t.max_dims(), 3);
  for (int dim = 1; dim <= 3; ++dim) {
    const auto a = t.columns(dim);
    const auto b = DirectionTable::Bundled().columns(dim);
    for (int j = 0; j < DirectionTable::kBits; ++j) EXPECT_EQ(a[j], b[j]);
  }
  EXPECT_THROW(t.columns(4), UnsupportedDimensionError);
  EXPECT_EQ(DirectionTable::Parse(std::string_view(text), 2).max_dims(), 2);
}

TEST(DirectionTableTest, FileMatchesBundled) {
  const DirectionTable t = DirectionTable::FromFile(KRQ_TEST_DIRECTION_FILE, 64);
  ASSERT_EQ(t.max_dims(), 64);
  for (int dim = 1; dim <= 64; ++dim) {
    const auto a = t.columns(dim);
    const auto b = DirectionTable::Bundled().columns(dim);
    for (int j = 0; j < DirectionTable::kBits; ++j) ASSERT_EQ(a[j], b[j]);
  }
  EXPECT_THROW(DirectionTable::FromFile("/nonexistent/table"), IoError);
}

TEST(DirectionTableTest, RejectsMalformedTables) {
  EXPECT_THROW(DirectionTable::Parse(std::string_view("d s a m\n2 1 0 2\n")), ConfigError);
  EXPECT_THROW(DirectionTable::Parse(std::string_view("d s a m\n2 1 0 5\n")), ConfigError);
  EXPECT_THROW(DirectionTable::Parse(std::string_view("d s a m\n3 1 0 1\n")), ConfigError);
  EXPECT_THROW(DirectionTable::Parse(std::string_view("d s a m\n2 2 1 1\n")), ConfigError);
}

}  // namespace
}  // namespace krq
