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

#ifndef KRQ_HASH_H_
#define KRQ_HASH_H_

#include <cstdint>
#include <string_view>

namespace krq {

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr uint64_t Mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

constexpr uint64_t HashCombine(uint64_t seed, uint64_t value) {
  return Mix64(seed ^ Mix64(value + kGoldenGamma));
}

constexpr uint64_t HashCombine(uint64_t seed, uint64_t v1, uint64_t v2) {
  return HashCombine(HashCombine(seed, v1), v2);
}

// Maps the top 52 bits of `bits` to the midpoint grid of (0, 1); both
// endpoints stay exactly representable away from 0 and 1.
constexpr double BitsToOpenUnit(uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// FNV-1a over bytes; used for content-addressed cache keys and manifests.
uint64_t Fnv1a64(std::string_view bytes);

// Small counter-based generator. Every draw is a pure function of
// (seed, draw index), so streams never depend on platform RNG internals.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t NextU64() { return HashCombine(seed_, counter_++); }
  double NextUniform() { return BitsToOpenUnit(NextU64()); }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

}  // namespace krq

#endif  // KRQ_HASH_H_
