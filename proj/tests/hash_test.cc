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

#include "krq/hash.h"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include "krq/parallel.h"

namespace krq {
namespace {

TEST(HashTest, SplitMixFinalizerReferenceValue) {
  // First output of SplitMix64 seeded with 0 is Mix64(golden gamma).
  EXPECT_EQ(Mix64(kGoldenGamma), 0xE220A8397B1DCDAFULL);
}

TEST(HashTest, Fnv1aReferenceValues) {
  EXPECT_EQ(Fnv1a64(""), 0xCBF29CE484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xAF63DC4C8601EC8CULL);
}

TEST(HashTest, OpenUnitNeverHitsEndpoints) {
  EXPECT_GT(BitsToOpenUnit(0), 0.0);
  EXPECT_LT(BitsToOpenUnit(~uint64_t{0}), 1.0);
  EXPECT_EQ(BitsToOpenUnit(~uint64_t{0}), 1.0 - 0x1.0p-53);
}

TEST(HashTest, CounterRngIsReproducibleAndSpread) {
  CounterRng a(7), b(7);
  std::set<uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(a.counter(), 1000u);
}

TEST(ParallelForTest, CoversRangeOnceAndRethrows) {
  setenv("KRQ_THREADS", "4", 1);
  std::vector<std::atomic<int>> hits(10000);
  ParallelFor(hits.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) ++hits[i];
  }, 16);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(ParallelFor(1000, [](std::size_t, std::size_t) { throw std::runtime_error("x"); }, 16),
               std::runtime_error);
  setenv("KRQ_THREADS", "1", 1);
  EXPECT_EQ(ThreadCount(), 1);
  unsetenv("KRQ_THREADS");
}

}  // namespace
}  // namespace krq
