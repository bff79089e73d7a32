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

#include "krq/quadstudy.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "krq/error.h"
#include "krq/eval.h"
#include "krq/hash.h"
#include "krq/parallel.h"

namespace krq {
namespace {

constexpr uint64_t kReferenceTag = 0x524546ULL;  // "REF"
constexpr uint64_t kStudyTag = 0x5354554459ULL;  // "STUDY"

// Two-sided 95% Student t quantiles for 1..30 degrees of freedom.
double StudentT975(int dof) {
  static constexpr double kTable[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return kTable[0];
  if (dof <= 30) return kTable[dof - 1];
  return 1.96;
}

double Mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

uint64_t StreamSeed(uint64_t seed, SamplerMethod method, std::size_t n, int replicate) {
  return HashCombine(HashCombine(seed ^ kStudyTag, static_cast<uint64_t>(method)),
                     static_cast<uint64_t>(n), static_cast<uint64_t>(replicate));
}

std::vector<std::size_t> SizesOf(const RateStudyConfig& config) {
  if (config.min_log2n < 4 || config.max_log2n < config.min_log2n || config.max_log2n > 16) {
    throw ConfigError("rate study needs 4 <= min_log2n <= max_log2n <= 16");
  }
  std::vector<std::size_t> ns;
  for (int m = config.min_log2n; m <= config.max_log2n; ++m) ns.push_back(std::size_t{1} << m);
  return ns;
}

void FitAll(RateTable& table, const std::vector<SamplerMethod>& methods) {
  const auto ns = table.SampleSizes();
  for (SamplerMethod method : methods) {
    std::vector<double> means;
    for (std::size_t n : ns) means.push_back(table.MeanAbsError(method, n));
    table.fits.push_back(FitLogLog(method, ns, means));
  }
}

}  // namespace

std::vector<double> IntegrandBatch(const NetworkParams& params, const ProblemSpec& problem,
                                   const PointSet& u) {
  const LabeledBatch batch = MakeLabeledBatch(u, problem);
  const Eigen::VectorXd pred = Predict(params, AsBatch(batch.x, batch.d));
  std::vector<double> g(batch.n);
  for (std::size_t i = 0; i < batch.n; ++i) {
    const double r = pred[static_cast<Eigen::Index>(i)] - batch.y[i];
    g[i] = r * r;
  }
  return g;
}

double Integrand(const NetworkParams& params, const ProblemSpec& problem,
                 std::span<const double> u) {
  const Sample s = MapSample(u, problem);
  const Eigen::VectorXd pred =
      Predict(params, AsBatch({s.x.data(), static_cast<std::size_t>(s.x.size())}, problem.d));
  const double r = pred[0] - s.y;
  return r * r;
}

ReferenceIntegral ComputeReferenceIntegral(const NetworkParams& params,
                                           const ProblemSpec& problem, std::size_t n_ref,
                                           int replicates, uint64_t seed) {
  if (n_ref < (std::size_t{1} << 16)) throw DomainError("reference integral needs n_ref >= 2^16");
  if (replicates < 8) throw DomainError("reference integral needs >= 8 replicates");
  ReferenceIntegral ref;
  ref.n_ref = n_ref;
  for (int r = 0; r < replicates; ++r) {
    const SamplerSpec spec{SamplerMethod::kOwen, problem.input_dim(),
                           HashCombine(seed ^ kReferenceTag, static_cast<uint64_t>(r))};
    ref.replicate_means.push_back(Mean(IntegrandBatch(params, problem, Generate(spec, n_ref))));
  }
  ref.value = Mean(ref.replicate_means);
  double ss = 0.0;
  for (double m : ref.replicate_means) ss += (m - ref.value) * (m - ref.value);
  const double rd = static_cast<double>(replicates);
  ref.ci = StudentT975(replicates - 1) * std::sqrt(ss / (rd - 1.0) / rd);
  return ref;
}

double RateTable::MeanAbsError(SamplerMethod method, std::size_t n) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& row : rows) {
    if (row.method == method && row.n == n) {
      sum += row.abs_error;
      ++count;
    }
  }
  if (count == 0) throw DomainError("no rate-table rows for the requested method and n");
  return sum / count;
}

std::vector<std::size_t> RateTable::SampleSizes() const {
  std::vector<std::size_t> ns;
  for (const auto& row : rows) {
    if (std::find(ns.begin(), ns.end(), row.n) == ns.end()) ns.push_back(row.n);
  }
  std::sort(ns.begin(), ns.end());
  return ns;
}

RateFit FitLogLog(SamplerMethod method, std::span<const std::size_t> ns,
                  std::span<const double> mean_errors) {
  if (ns.size() != mean_errors.size() || ns.size() < 2) {
    throw DomainError("slope fit needs at least two (n, error) pairs");
  }
  const std::size_t k = ns.size();
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(mean_errors[i] > 0.0)) throw DomainError("slope fit needs positive errors");
    xs[i] = std::log2(static_cast<double>(ns[i]));
    ys[i] = std::log2(mean_errors[i]);
  }
  const double mx = Mean(xs);
  const double my = Mean(ys);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.method = method;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RateTable RateStudy(const NetworkParams& params, const ProblemSpec& problem,
                    const RateStudyConfig& config) {
  if (config.replicates < 16) throw ConfigError("rate study needs >= 16 replicates");
  const auto ns = SizesOf(config);
  RateTable table;
  table.reference = ComputeReferenceIntegral(params, problem, std::size_t{1} << config.ref_log2n,
                                             config.ref_replicates, config.seed);
  struct Job {
    SamplerMethod method;
    std::size_t n;
    int replicate;
  };
  std::vector<Job> jobs;
  for (SamplerMethod method : config.methods) {
    for (std::size_t n : ns) {
      for (int r = 0; r < config.replicates; ++r) jobs.push_back({method, n, r});
    }
  }
  table.rows.resize(jobs.size());
  ParallelFor(
      jobs.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
          const Job& job = jobs[k];
          const SamplerSpec spec{job.method, problem.input_dim(),
                                 StreamSeed(config.seed, job.method, job.n, job.replicate)};
          const double estimate = Mean(IntegrandBatch(params, problem, Generate(spec, job.n)));
          table.rows[k] = {job.method, job.n, job.replicate,
                           std::abs(estimate - table.reference.value)};
        }
      },
      1);
  FitAll(table, config.methods);

  double smallest = std::numeric_limits<double>::infinity();
  for (SamplerMethod method : config.methods) {
    for (std::size_t n : ns) smallest = std::min(smallest, table.MeanAbsError(method, n));
  }
  if (!(table.reference.ci < config.precision_fraction * smallest)) {
    throw PrecisionError("reference integral half-width " + std::to_string(table.reference.ci) +
                         " is not below " + std::to_string(config.precision_fraction) +
                         " x smallest mean error " + std::to_string(smallest) +
                         "; increase the reference sample size");
  }
  return table;
}

RateTable RetrainRateStudy(const NetworkParams& init, const ProblemSpec& problem,
                           const RateStudyConfig& config, const RetrainConfig& retrain) {
  if (config.replicates < 16) throw ConfigError("rate study needs >= 16 replicates");
  const auto ns = SizesOf(config);
  const EvaluationSet eval_set =
      BuildEvaluationSet(problem, std::size_t{1} << retrain.eval_log2m, retrain.eval_seed);
  RateTable table;
  table.retrained = true;
  for (SamplerMethod method : config.methods) {
    for (std::size_t n : ns) {
      for (int r = 0; r < config.replicates; ++r) {
        const SamplerSpec spec{method, problem.input_dim(),
                               StreamSeed(config.seed, method, n, r)};
        const LabeledBatch batch = MakeLabeledBatch(Generate(spec, n), problem);
        NetworkParams params = init;
        OptimizerState state = OptimizerState::Init(params, retrain.optimizer.lr);
        ForwardCache cache;
        const Eigen::Map<const Eigen::VectorXd> labels(batch.y.data(),
                                                       static_cast<Eigen::Index>(batch.n));
        for (int it = 0; it < retrain.iterations; ++it) {
          const Eigen::VectorXd pred =
              Forward(params, AsBatch(batch.x, batch.d), Mode::kTrain, &cache);
          const Eigen::VectorXd residuals = pred - labels;
          AdamWStep(params, Backward(cache, params, residuals), state, retrain.optimizer);
        }
        const Eigen::VectorXd pred = Predict(params, AsBatch(eval_set.x, eval_set.d));
        double excess = 0.0;
        for (std::size_t i = 0; i < eval_set.m; ++i) {
          const double diff = pred[static_cast<Eigen::Index>(i)] - eval_set.exact[i];
          excess += diff * diff;
        }
        table.rows.push_back({method, n, r, excess / static_cast<double>(eval_set.m)});
      }
    }
  }
  FitAll(table, config.methods);
  return table;
}

}  // namespace krq
