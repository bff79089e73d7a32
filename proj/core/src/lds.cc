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

#include "krq/lds.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "krq/error.h"
#include "krq/hash.h"
#include "krq/parallel.h"

namespace krq {
namespace {

constexpr uint64_t kMaxNetPoints = uint64_t{1} << 32;
constexpr uint64_t kShiftTag = 0x5348494654ULL;  // "SHIFT"
constexpr uint64_t kOwenTag = 0x4F57454EULL;     // "OWEN"
constexpr uint64_t kIidTag = 0x494944ULL;        // "IID"

uint64_t OwenKey(int dim, uint64_t seed) {
  return HashCombine(seed ^ kOwenTag, static_cast<uint64_t>(dim));
}

// Node of the permutation tree above digit k: heap index of the k-digit
// prefix, unique across levels.
bool OwenFlip(uint64_t key, int k, uint32_t prefix_source) {
  const uint64_t prefix = k == 0 ? 0 : (prefix_source >> (32 - k));
  const uint64_t node = (uint64_t{1} << k) | prefix;
  return (Mix64(key ^ (node * kGoldenGamma)) >> 63) != 0;
}

}  // namespace

std::string_view ToString(SamplerMethod method) {
  switch (method) {
    case SamplerMethod::kIid:
      return "iid";
    case SamplerMethod::kDigitalShift:
      return "digital_shift";
    case SamplerMethod::kOwen:
      return "owen";
  }
  return "unknown";
}

SamplerMethod ParseSamplerMethod(std::string_view name) {
  if (name == "iid" || name == "mc") return SamplerMethod::kIid;
  if (name == "digital_shift" || name == "shift") return SamplerMethod::kDigitalShift;
  if (name == "owen" || name == "rqmc") return SamplerMethod::kOwen;
  throw ConfigError("unknown sampler method '" + std::string(name) + "'");
}

PointSet::PointSet(SamplerSpec spec, std::size_t n, std::vector<double> values)
    : spec_(spec), n_(n), values_(std::move(values)) {
  if (values_.size() != n * static_cast<std::size_t>(spec.s)) {
    throw ShapeError("point set storage does not match n x s");
  }
}

uint32_t SobolRaw(uint64_t index, int dim, const DirectionTable& table) {
  if (index >= kMaxNetPoints) {
    throw DomainError("Sobol index " + std::to_string(index) + " exceeds 2^32 - 1");
  }
  const auto v = table.columns(dim);
  uint32_t word = 0;
  for (int j = 0; index != 0; ++j, index >>= 1) {
    if (index & 1u) word ^= v[static_cast<std::size_t>(j)];
  }
  return word;
}

uint32_t OwenScramble(uint32_t word, int dim, uint64_t seed) {
  const uint64_t key = OwenKey(dim, seed);
  uint32_t out = word;
  for (int k = 0; k < 32; ++k) {
    if (OwenFlip(key, k, word)) out ^= 1u << (31 - k);
  }
  return out;
}

uint32_t OwenUnscramble(uint32_t word, int dim, uint64_t seed) {
  const uint64_t key = OwenKey(dim, seed);
  uint32_t in = 0;
  for (int k = 0; k < 32; ++k) {
    const uint32_t bit = 1u << (31 - k);
    const bool flip = OwenFlip(key, k, in);
    if (((word & bit) != 0) != flip) in |= bit;
  }
  return in;
}

uint32_t DigitalShiftWord(int dim, uint64_t seed) {
  return static_cast<uint32_t>(
      HashCombine(seed ^ kShiftTag, static_cast<uint64_t>(dim)) >> 32);
}

double WordToUnit(uint32_t word) {
  return word == 0 ? 0x1.0p-33 : static_cast<double>(word) * 0x1.0p-32;
}

double SamplePoint(const SamplerSpec& spec, uint64_t index, int j,
                   const DirectionTable& table) {
  const int dim = j + 1;
  switch (spec.method) {
    case SamplerMethod::kIid:
      return BitsToOpenUnit(
          HashCombine(spec.seed ^ kIidTag, index, static_cast<uint64_t>(dim)));
    case SamplerMethod::kDigitalShift:
      return WordToUnit(SobolRaw(index, dim, table) ^ DigitalShiftWord(dim, spec.seed));
    case SamplerMethod::kOwen:
      return WordToUnit(OwenScramble(SobolRaw(index, dim, table), dim, spec.seed));
  }
  return 0.5;
}

PointSet Generate(const SamplerSpec& spec, std::size_t n, uint64_t start_index,
                  const DirectionTable& table) {
  if (spec.s < 1) throw DomainError("sampler dimension must be >= 1");
  if (IsNetMethod(spec.method)) {
    if (spec.s > table.max_dims()) {
      throw UnsupportedDimensionError("sampler dimension " + std::to_string(spec.s) +
                                      " exceeds direction table (" +
                                      std::to_string(table.max_dims()) + ")");
    }
    if (!std::has_single_bit(n)) {
      throw DomainError("digital nets require a power-of-two sample size, got " +
                        std::to_string(n));
    }
    if (start_index > kMaxNetPoints || n > kMaxNetPoints - start_index) {
      throw ExhaustionError("net indices [" + std::to_string(start_index) + ", " +
                            std::to_string(start_index + n) + ") exceed 2^32");
    }
  }
  const auto s = static_cast<std::size_t>(spec.s);
  std::vector<double> values(n * s);
  if (IsNetMethod(spec.method)) {
    // Per-dimension scramble keys and shifts are hoisted out of the point loop.
    std::vector<uint32_t> shifts(s);
    std::vector<std::span<const uint32_t, DirectionTable::kBits>> cols;
    cols.reserve(s);
    for (std::size_t j = 0; j < s; ++j) {
      cols.push_back(table.columns(static_cast<int>(j) + 1));
      shifts[j] = DigitalShiftWord(static_cast<int>(j) + 1, spec.seed);
    }
    ParallelFor(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const uint64_t index = start_index + i;
        for (std::size_t j = 0; j < s; ++j) {
          uint32_t word = 0;
          uint64_t bits = index;
          for (std::size_t c = 0; bits != 0; ++c, bits >>= 1) {
            if (bits & 1u) word ^= cols[j][c];
          }
          word = spec.method == SamplerMethod::kOwen
                     ? OwenScramble(word, static_cast<int>(j) + 1, spec.seed)
                     : word ^ shifts[j];
          values[i * s + j] = WordToUnit(word);
        }
      }
    });
  } else {
    ParallelFor(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
          values[i * s + j] = SamplePoint(spec, start_index + i, static_cast<int>(j), table);
        }
      }
    });
  }
  return PointSet(spec, n, std::move(values));
}

double L2StarDiscrepancy(const PointSet& points) {
  const std::size_t n = points.n();
  const int s = points.s();
  if (n == 0) throw DomainError("discrepancy of an empty point set");
  double single = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int k = 0; k < s; ++k) {
      const double x = points(i, k);
      prod *= 1.0 - x * x;
    }
    single += prod;
  }
  double pair = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double prod = 1.0;
      for (int k = 0; k < s; ++k) prod *= 1.0 - std::max(points(i, k), points(j, k));
      pair += prod;
    }
  }
  const double nd = static_cast<double>(n);
  const double sq = std::pow(3.0, -s) - std::pow(2.0, 1 - s) / nd * single + pair / (nd * nd);
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace krq
