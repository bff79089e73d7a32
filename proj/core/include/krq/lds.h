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

#ifndef KRQ_LDS_H_
#define KRQ_LDS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krq/direction_table.h"

namespace krq {

enum class SamplerMethod { kIid, kDigitalShift, kOwen };

std::string_view ToString(SamplerMethod method);
// Accepts "iid"/"mc", "digital_shift", "owen"/"rqmc". Throws ConfigError.
SamplerMethod ParseSamplerMethod(std::string_view name);

inline bool IsNetMethod(SamplerMethod m) { return m != SamplerMethod::kIid; }

struct SamplerSpec {
  SamplerMethod method = SamplerMethod::kOwen;
  int s = 1;
  uint64_t seed = 0;
};

// n points in the open unit cube (0,1)^s, stored row-major.
class PointSet {
 public:
  PointSet() = default;
  PointSet(SamplerSpec spec, std::size_t n, std::vector<double> values);

  std::size_t n() const { return n_; }
  int s() const { return spec_.s; }
  const SamplerSpec& spec() const { return spec_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * static_cast<std::size_t>(spec_.s),
            static_cast<std::size_t>(spec_.s)};
  }
  double operator()(std::size_t i, int j) const {
    return values_[i * static_cast<std::size_t>(spec_.s) + static_cast<std::size_t>(j)];
  }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.n_ == b.n_ && a.spec_.s == b.spec_.s && a.values_ == b.values_;
  }

 private:
  SamplerSpec spec_;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Digit word of Sobol' point `index` in dimension `dim` (1-based): the XOR of
// the generator columns selected by the binary digits of `index`.
uint32_t SobolRaw(uint64_t index, int dim,
                  const DirectionTable& table = DirectionTable::Bundled());

// Nested uniform (Owen) scrambling of a 32-digit word. The flip applied to
// digit k is a coin keyed by (seed, dim) and the k-1 leading input digits,
// i.e. one node of a random permutation tree.
uint32_t OwenScramble(uint32_t word, int dim, uint64_t seed);
uint32_t OwenUnscramble(uint32_t word, int dim, uint64_t seed);

// Random digital shift word for (dim, seed); applied with XOR.
uint32_t DigitalShiftWord(int dim, uint64_t seed);

// word / 2^32, with the all-zero word sent to 2^-33.
double WordToUnit(uint32_t word);

// Coordinate j (0-based) of point `index` under `spec`.
double SamplePoint(const SamplerSpec& spec, uint64_t index, int j,
                   const DirectionTable& table = DirectionTable::Bundled());

// Points with indices [start_index, start_index + n). Net methods require n
// to be a power of two and start_index + n <= 2^32.
PointSet Generate(const SamplerSpec& spec, std::size_t n, uint64_t start_index = 0,
                  const DirectionTable& table = DirectionTable::Bundled());

// L2 star discrepancy by Warnock's formula. O(n^2 s).
double L2StarDiscrepancy(const PointSet& points);

}  // namespace krq

#endif  // KRQ_LDS_H_
