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

#ifndef KRQ_EVAL_H_
#define KRQ_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "krq/lds.h"
#include "krq/nn.h"
#include "krq/problems.h"

namespace krq {

// How reference solutions are obtained when no closed form exists.
struct OracleConfig {
  int log2n = 18;
  SamplerMethod method = SamplerMethod::kOwen;
  int replicates = 16;
  uint64_t seed = 0x5EED0AC1EULL;
  // When non-empty, oracle values are cached here keyed by a content hash
  // of the request.
  std::filesystem::path cache_dir;
};

// Uniform evaluation points in [a,b]^d with reference solution values.
struct EvaluationSet {
  std::size_t m = 0;
  uint64_t seed = 0;
  int d = 0;
  std::vector<double> x;      // m x d, row-major
  std::vector<double> exact;  // u*(T, x_i)
  // Per-point oracle standard errors; empty for closed-form problems.
  std::vector<double> exact_std_error;
  bool from_oracle = false;
};

// m i.i.d. uniform points keyed by seed. Closed-form solutions are used when
// available, otherwise the path-simulation oracle.
EvaluationSet BuildEvaluationSet(const ProblemSpec& problem, std::size_t m, uint64_t seed,
                                 const OracleConfig& oracle = {});

struct EvalReport {
  double rel_l2 = 0.0;
  std::size_t m = 0;
  uint64_t seed = 0;
  std::optional<double> oracle_std_error;  // RMS of the per-point errors
};

// sqrt(sum (f(x_i) - u*(x_i))^2 / sum u*(x_i)^2) with eval-mode batch norm.
// Throws DomainError when the denominator vanishes.
EvalReport RelativeL2(const NetworkParams& params, const EvaluationSet& set);
EvalReport RelativeL2(const NetworkParams& params, const ProblemSpec& problem, std::size_t m,
                      uint64_t seed, const OracleConfig& oracle = {});

struct GridCell {
  double x1 = 0.0;
  double x2 = 0.0;
  double prediction = 0.0;
  double exact = 0.0;
  double rel_err = 0.0;
  double exact_std_error = 0.0;
};

struct ProjectionGrid {
  int free_first = 0;   // 0-based coordinate indices
  int free_second = 1;
  int resolution = 50;
  bool from_oracle = false;
  std::size_t oracle_samples = 0;
  std::vector<GridCell> cells;  // row-major over (x1, x2)
};

// Evaluates the network and the reference solution on a resolution x
// resolution uniform grid over [a,b]^2 in the two coordinates left unset in
// `fixed` (size d); all other coordinates take their fixed values.
ProjectionGrid MakeProjectionGrid(const NetworkParams& params, const ProblemSpec& problem,
                                  const std::vector<std::optional<double>>& fixed,
                                  int resolution = 50, const OracleConfig& oracle = {});

}  // namespace krq

#endif  // KRQ_EVAL_H_
