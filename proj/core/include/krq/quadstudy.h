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

#ifndef KRQ_QUADSTUDY_H_
#define KRQ_QUADSTUDY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "krq/lds.h"
#include "krq/nn.h"
#include "krq/optimizer.h"
#include "krq/problems.h"

namespace krq {

// g(u) = [f(a + (b-a) u_{1:d}) - F(u)]^2 for a frozen network (eval mode).
double Integrand(const NetworkParams& params, const ProblemSpec& problem,
                 std::span<const double> u);
std::vector<double> IntegrandBatch(const NetworkParams& params, const ProblemSpec& problem,
                                   const PointSet& u);

struct ReferenceIntegral {
  double value = 0.0;
  double ci = 0.0;  // 95% half-width from the replicate spread
  std::size_t n_ref = 0;
  std::vector<double> replicate_means;
};

// Mean of `replicates` independent Owen-scrambled estimates of size n_ref.
// Requires n_ref >= 2^16 and replicates >= 8.
ReferenceIntegral ComputeReferenceIntegral(const NetworkParams& params,
                                           const ProblemSpec& problem, std::size_t n_ref,
                                           int replicates, uint64_t seed);

struct RateRow {
  SamplerMethod method = SamplerMethod::kIid;
  std::size_t n = 0;
  int replicate = 0;
  double abs_error = 0.0;
};

// Least-squares fit of log2(mean abs error) against log2(n).
struct RateFit {
  SamplerMethod method = SamplerMethod::kIid;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
  std::vector<RateFit> fits;
  ReferenceIntegral reference;
  bool retrained = false;

  // Mean of abs_error over the replicates of (method, n).
  double MeanAbsError(SamplerMethod method, std::size_t n) const;
  std::vector<std::size_t> SampleSizes() const;
};

struct RateStudyConfig {
  std::vector<SamplerMethod> methods = {SamplerMethod::kIid, SamplerMethod::kOwen};
  int min_log2n = 6;
  int max_log2n = 13;
  int replicates = 32;
  uint64_t seed = 0;
  int ref_log2n = 18;
  int ref_replicates = 16;
  // The reference half-width must stay below this fraction of the smallest
  // mean error in the table.
  double precision_fraction = 0.05;
};

// Integration error |I_n - I| of the empirical risk of a fixed network,
// per (method, n, replicate), with log-log slope fits. Stream seeds are
// keyed by (seed, method, n, replicate). Throws PrecisionError if the
// reference integral is too coarse for the smallest observed error.
RateTable RateStudy(const NetworkParams& params, const ProblemSpec& problem,
                    const RateStudyConfig& config);

RateFit FitLogLog(SamplerMethod method, std::span<const std::size_t> ns,
                  std::span<const double> mean_errors);

struct RetrainConfig {
  int iterations = 500;
  AdamWHyper optimizer;
  int eval_log2m = 14;
  uint64_t eval_seed = 1;
};

// Expensive variant: for every (method, n, replicate) a network is trained
// from `init` by full-batch AdamW on one fixed sample of size n, and the
// excess risk E[(f(X) - u*(T,X))^2] is recorded as abs_error.
RateTable RetrainRateStudy(const NetworkParams& init, const ProblemSpec& problem,
                           const RateStudyConfig& config, const RetrainConfig& retrain);

}  // namespace krq

#endif  // KRQ_QUADSTUDY_H_
