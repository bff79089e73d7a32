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

#ifndef KRQ_TRAIN_H_
#define KRQ_TRAIN_H_

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "krq/eval.h"
#include "krq/lds.h"
#include "krq/nn.h"
#include "krq/optimizer.h"
#include "krq/problems.h"

namespace krq {

enum class RqmcMode {
  kRescrambleEachBatch,  // fresh scrambling per iteration over indices 0..n-1
  kSequentialStream,     // one scrambling, consecutive index blocks
};

std::string_view ToString(RqmcMode mode);
RqmcMode ParseRqmcMode(std::string_view name);

struct TrainingSeeds {
  uint64_t net = 0;
  uint64_t data = 0;
  uint64_t eval = 1;
};

struct TrainingConfig {
  std::string preset;
  ProblemSpec problem = HeatProblem(5);
  SamplerMethod sampler = SamplerMethod::kOwen;
  int batch_log2 = 10;
  int iterations = 32000;
  RqmcMode rqmc_mode = RqmcMode::kRescrambleEachBatch;
  int width_factor = 4;
  int depth = 6;
  bool batch_norm = true;
  AdamWHyper optimizer;
  PlateauSchedule schedule;
  int eval_every = 500;
  int eval_log2m = 16;
  TrainingSeeds seeds;
  OracleConfig oracle;

  std::size_t batch_size() const { return std::size_t{1} << batch_log2; }
  NetworkSpec network_spec() const;
  void Validate() const;
};

// Table-based presets: heat_d5, heat_d20, bs_d5, bs_d20, and the *_desk
// variants (8000 iterations, LR patience scaled to 1000, 2^14 evaluation
// points).
TrainingConfig PresetConfig(std::string_view name);
std::vector<std::string> PresetNames();

// Reads {"preset": ..., overrides...} or a full configuration.
TrainingConfig TrainingConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const TrainingConfig& config);

struct LossRecord {
  int iteration = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct EvalRecord {
  int iteration = 0;
  double rel_l2 = 0.0;
};

struct RunSummary {
  std::string method;
  std::size_t batch_size = 0;
  uint64_t seed = 0;
  double final_rel_l2 = 0.0;
  double wall_seconds = 0.0;
  std::string norm_mode = "eval";  // batch-norm statistics used for rel_l2
};

struct RunLog {
  std::vector<LossRecord> losses;
  std::vector<EvalRecord> evals;
  RunSummary summary;
};

struct TrainResult {
  NetworkParams params;
  RunLog log;
};

// The uniform block for iteration `iteration` (0-based); see RqmcMode.
// Throws ExhaustionError when a sequential stream passes 2^32 points.
PointSet MakeBatchPoints(const TrainingConfig& config, int iteration);
LabeledBatch MakeBatch(const TrainingConfig& config, int iteration);

// (1/n) sum (f(x_i) - y_i)^2.
double EmpiricalRisk(std::span<const double> predictions, std::span<const double> labels);
double EmpiricalRisk(const NetworkParams& params, const LabeledBatch& batch,
                     Mode mode = Mode::kTrain);

// Called after every iteration with (iteration, loss).
using ProgressFn = std::function<void(int, double)>;

// Runs the ERM loop: batch -> forward(train) -> backward -> AdamW -> plateau
// schedule, logging every iteration and evaluating every eval_every
// iterations plus the last one. Throws DivergenceError on a non-finite loss.
TrainResult Train(const TrainingConfig& config, const ProgressFn& progress = {});
TrainResult Train(const TrainingConfig& config, const EvaluationSet& eval_set,
                  const ProgressFn& progress = {});

}  // namespace krq

#endif  // KRQ_TRAIN_H_
