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

#include "krq/train.h"

#include <chrono>
#include <cmath>
#include <string>

#include "krq/error.h"
#include "krq/hash.h"

namespace krq {
namespace {

constexpr uint64_t kBatchTag = 0x4241544348ULL;  // "BATCH"

template <typename T>
void ReadIf(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string_view ToString(RqmcMode mode) {
  return mode == RqmcMode::kRescrambleEachBatch ? "rescramble_each_batch" : "sequential_stream";
}

RqmcMode ParseRqmcMode(std::string_view name) {
  if (name == "rescramble_each_batch" || name == "rescramble") {
    return RqmcMode::kRescrambleEachBatch;
  }
  if (name == "sequential_stream" || name == "sequential") return RqmcMode::kSequentialStream;
  throw ConfigError("unknown rqmc_mode '" + std::string(name) + "'");
}

NetworkSpec TrainingConfig::network_spec() const {
  return NetworkSpec::ForInputDim(problem.d, width_factor, depth, batch_norm, seeds.net);
}

void TrainingConfig::Validate() const {
  problem.Validate();
  if (batch_log2 < 1 || batch_log2 > 24) throw ConfigError("batch_log2 must be in [1, 24]");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (eval_log2m < 0 || eval_log2m > 24) throw ConfigError("eval_log2m must be in [0, 24]");
  if (width_factor < 1 || depth < 2) throw ConfigError("network needs width >= 1, depth >= 2");
  if (schedule.patience < 1) throw ConfigError("lr patience must be >= 1");
  if (!(optimizer.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (IsNetMethod(sampler) && problem.input_dim() > DirectionTable::Bundled().max_dims()) {
    throw UnsupportedDimensionError("problem needs " + std::to_string(problem.input_dim()) +
                                    " uniform dimensions; the direction table has " +
                                    std::to_string(DirectionTable::Bundled().max_dims()));
  }
}

std::vector<std::string> PresetNames() {
  return {"heat_d5", "heat_d20", "bs_d5", "bs_d20",
          "heat_d5_desk", "heat_d20_desk", "bs_d5_desk", "bs_d20_desk"};
}

TrainingConfig PresetConfig(std::string_view name) {
  std::string base(name);
  const bool desk = base.size() > 5 && base.ends_with("_desk");
  if (desk) base.resize(base.size() - 5);
  TrainingConfig config;
  config.preset = std::string(name);
  if (base == "heat_d5" || base == "heat_d20") {
    config.problem = HeatProblem(base == "heat_d5" ? 5 : 20);
    config.schedule.ratio = 0.4;
  } else if (base == "bs_d5" || base == "bs_d20") {
    config.problem = BlackScholesProblem(base == "bs_d5" ? 5 : 20);
    config.schedule.ratio = 0.25;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  config.width_factor = 4;
  config.depth = 6;
  config.batch_norm = true;
  config.optimizer = AdamWHyper{};
  config.iterations = 32000;
  config.schedule.patience = 4000;
  config.eval_every = 500;
  config.eval_log2m = 16;
  if (desk) {
    config.iterations = 8000;
    config.schedule.patience = 4000 * 8000 / 32000;
    config.eval_log2m = 14;
  }
  return config;
}

TrainingConfig TrainingConfigFromJson(const nlohmann::json& j) {
  try {
    TrainingConfig config;
    if (j.contains("preset")) config = PresetConfig(j.at("preset").get<std::string>());
    if (j.contains("problem")) {
      const auto& p = j.at("problem");
      if (p.is_string()) {
        const std::string name = p.get<std::string>();
        if (name.rfind("heat_d", 0) == 0 || name.rfind("bs_d", 0) == 0) {
          const auto preset = PresetConfig(name);
          config.problem = preset.problem;
          config.schedule.ratio = preset.schedule.ratio;
        } else {
          throw ConfigError("problem name '" + name + "' needs an object with d");
        }
      } else {
        config.problem = ProblemFromJson(p);
      }
    }
    if (j.contains("sampler")) config.sampler = ParseSamplerMethod(j.at("sampler").get<std::string>());
    if (j.contains("rqmc_mode")) config.rqmc_mode = ParseRqmcMode(j.at("rqmc_mode").get<std::string>());
    ReadIf(j, "batch_log2", config.batch_log2);
    ReadIf(j, "iterations", config.iterations);
    ReadIf(j, "eval_every", config.eval_every);
    ReadIf(j, "eval_log2m", config.eval_log2m);
    if (j.contains("network")) {
      const auto& n = j.at("network");
      ReadIf(n, "width_factor", config.width_factor);
      ReadIf(n, "depth", config.depth);
      ReadIf(n, "batch_norm", config.batch_norm);
    }
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      ReadIf(o, "lr", config.optimizer.lr);
      ReadIf(o, "beta1", config.optimizer.beta1);
      ReadIf(o, "beta2", config.optimizer.beta2);
      ReadIf(o, "eps", config.optimizer.eps);
      ReadIf(o, "weight_decay", config.optimizer.weight_decay);
    }
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      ReadIf(s, "ratio", config.schedule.ratio);
      ReadIf(s, "patience", config.schedule.patience);
      ReadIf(s, "min_lr", config.schedule.min_lr);
      ReadIf(s, "smoothing", config.schedule.smoothing);
      ReadIf(s, "threshold", config.schedule.threshold);
    }
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      ReadIf(s, "net", config.seeds.net);
      ReadIf(s, "data", config.seeds.data);
      ReadIf(s, "eval", config.seeds.eval);
    }
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      ReadIf(o, "log2n", config.oracle.log2n);
      ReadIf(o, "replicates", config.oracle.replicates);
      ReadIf(o, "seed", config.oracle.seed);
      if (o.contains("method")) config.oracle.method = ParseSamplerMethod(o.at("method").get<std::string>());
      if (o.contains("cache_dir")) config.oracle.cache_dir = o.at("cache_dir").get<std::string>();
    }
    config.Validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
}

nlohmann::json ToJson(const TrainingConfig& c) {
  nlohmann::json j;
  if (!c.preset.empty()) j["preset"] = c.preset;
  j["problem"] = ToJson(c.problem);
  j["sampler"] = std::string(ToString(c.sampler));
  j["rqmc_mode"] = std::string(ToString(c.rqmc_mode));
  j["batch_log2"] = c.batch_log2;
  j["iterations"] = c.iterations;
  j["eval_every"] = c.eval_every;
  j["eval_log2m"] = c.eval_log2m;
  j["network"] = {{"width_factor", c.width_factor}, {"depth", c.depth}, {"batch_norm", c.batch_norm}};
  j["optimizer"] = {{"lr", c.optimizer.lr},
                    {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2},
                    {"eps", c.optimizer.eps},
                    {"weight_decay", c.optimizer.weight_decay}};
  j["schedule"] = {{"ratio", c.schedule.ratio},
                   {"patience", c.schedule.patience},
                   {"min_lr", c.schedule.min_lr},
                   {"smoothing", c.schedule.smoothing},
                   {"threshold", c.schedule.threshold}};
  j["seeds"] = {{"net", c.seeds.net}, {"data", c.seeds.data}, {"eval", c.seeds.eval}};
  j["oracle"] = {{"log2n", c.oracle.log2n},
                 {"method", std::string(ToString(c.oracle.method))},
                 {"replicates", c.oracle.replicates},
                 {"seed", c.oracle.seed},
                 {"cache_dir", c.oracle.cache_dir.string()}};
  return j;
}

PointSet MakeBatchPoints(const TrainingConfig& config, int iteration) {
  const std::size_t n = config.batch_size();
  const int s = config.problem.input_dim();
  const auto it = static_cast<uint64_t>(iteration);
  SamplerSpec spec{config.sampler, s, 0};
  if (!IsNetMethod(config.sampler) || config.rqmc_mode == RqmcMode::kRescrambleEachBatch) {
    spec.seed = HashCombine(config.seeds.data ^ kBatchTag, it);
    return Generate(spec, n, 0);
  }
  spec.seed = config.seeds.data ^ kBatchTag;
  const uint64_t start = it * n;
  if (start + n > (uint64_t{1} << 32)) {
    throw ExhaustionError("sequential RQMC stream exhausted at iteration " +
                          std::to_string(iteration) + " (2^32 points)");
  }
  return Generate(spec, n, start);
}

LabeledBatch MakeBatch(const TrainingConfig& config, int iteration) {
  return MakeLabeledBatch(MakeBatchPoints(config, iteration), config.problem);
}

double EmpiricalRisk(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size() || labels.empty()) {
    throw ShapeError("empirical risk needs matching, non-empty predictions and labels");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double r = predictions[i] - labels[i];
    sum += r * r;
  }
  return sum / static_cast<double>(labels.size());
}

double EmpiricalRisk(const NetworkParams& params, const LabeledBatch& batch, Mode mode) {
  const Eigen::VectorXd pred = Predict(params, AsBatch(batch.x, batch.d), mode);
  return EmpiricalRisk({pred.data(), static_cast<std::size_t>(pred.size())}, batch.y);
}

TrainResult Train(const TrainingConfig& config, const ProgressFn& progress) {
  config.Validate();
  const EvaluationSet eval_set = BuildEvaluationSet(
      config.problem, std::size_t{1} << config.eval_log2m, config.seeds.eval, config.oracle);
  return Train(config, eval_set, progress);
}

TrainResult Train(const TrainingConfig& config, const EvaluationSet& eval_set,
                  const ProgressFn& progress) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  TrainResult result{XavierInit(config.network_spec()), {}};
  NetworkParams& params = result.params;
  RunLog& log = result.log;
  OptimizerState state = OptimizerState::Init(params, config.optimizer.lr);
  ForwardCache cache;
  log.losses.reserve(static_cast<std::size_t>(config.iterations));

  for (int it = 0; it < config.iterations; ++it) {
    const LabeledBatch batch = MakeBatch(config, it);
    const Eigen::VectorXd pred = Forward(params, AsBatch(batch.x, batch.d), Mode::kTrain, &cache);
    const Eigen::VectorXd residuals =
        pred - Eigen::Map<const Eigen::VectorXd>(batch.y.data(), static_cast<Eigen::Index>(batch.n));
    const double loss = residuals.squaredNorm() / static_cast<double>(batch.n);
    if (!std::isfinite(loss)) {
      throw DivergenceError("training diverged: loss is " + std::to_string(loss) +
                            " at iteration " + std::to_string(it + 1));
    }
    const ParamBlock grads = Backward(cache, params, residuals);
    const double lr_used = state.lr;
    AdamWStep(params, grads, state, config.optimizer);
    PlateauLr(state, loss, config.schedule);
    log.losses.push_back({it + 1, loss, lr_used});
    if ((it + 1) % config.eval_every == 0 || it + 1 == config.iterations) {
      log.evals.push_back({it + 1, RelativeL2(params, eval_set).rel_l2});
    }
    if (progress) progress(it + 1, loss);
  }

  log.summary.method = std::string(ToString(config.sampler));
  log.summary.batch_size = config.batch_size();
  log.summary.seed = config.seeds.data;
  log.summary.final_rel_l2 = log.evals.back().rel_l2;
  log.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace krq
