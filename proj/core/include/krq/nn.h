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

#ifndef KRQ_NN_H_
#define KRQ_NN_H_

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

namespace krq {

// Layer widths (N_0 = d, N_1, ..., N_{L-1}, N_L = 1).
struct NetworkSpec {
  std::vector<int> widths;
  bool batch_norm = true;
  uint64_t seed = 0;

  int num_layers() const { return static_cast<int>(widths.size()) - 1; }
  int input_dim() const { return widths.front(); }
  void Validate() const;

  // `depth` affine layers; every hidden layer is width_factor * d wide.
  static NetworkSpec ForInputDim(int d, int width_factor, int depth, bool batch_norm,
                                 uint64_t seed);
};

nlohmann::json ToJson(const NetworkSpec& spec);
NetworkSpec NetworkSpecFromJson(const nlohmann::json& j);

struct DenseLayer {
  Eigen::MatrixXd weight;  // N_l x N_{l-1}
  Eigen::VectorXd bias;    // N_l
};

struct NormAffine {
  Eigen::VectorXd scale;  // gamma
  Eigen::VectorXd shift;  // beta
};

// Every trainable tensor of the network. Also used for gradients and
// optimizer moments, which share the layout.
struct ParamBlock {
  std::vector<DenseLayer> dense;
  std::vector<NormAffine> norm;  // one per hidden layer when batch norm is on

  // Flat views in a fixed order: per layer weight then bias, then per
  // norm site scale then shift.
  std::vector<std::span<double>> Views();
  std::vector<std::span<const double>> Views() const;
  std::size_t size() const;
  ParamBlock ZerosLike() const;
};

struct RunningStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
};

struct NetworkParams {
  NetworkSpec spec;
  ParamBlock trainable;
  std::vector<RunningStats> running;  // batch-norm running statistics

  // sum_l (N_l N_{l-1} + N_l), plus 4 N_l per batch-norm site.
  std::size_t ParameterCount() const;
};

// Uniform(-r, r) weights with r = sqrt(6 / (fan_in + fan_out)), zero biases,
// unit scales, zero shifts, running mean 0 and variance 1.
NetworkParams XavierInit(const NetworkSpec& spec);

double Sigmoid(double x);
double Swish(double x);
double SwishGrad(double x);

enum class Mode { kTrain, kEval };

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

// A batch of n inputs viewed as a d x n column-major matrix; this is the
// same memory as an n x d row-major block.
using BatchView = Eigen::Map<const Eigen::MatrixXd>;
inline BatchView AsBatch(std::span<const double> x_rows, int d) {
  return BatchView(x_rows.data(), d, static_cast<Eigen::Index>(x_rows.size()) / d);
}

struct HiddenCache {
  Eigen::MatrixXd input;       // h_{l-1}
  Eigen::MatrixXd normalized;  // x-hat (batch norm only)
  Eigen::VectorXd inv_std;     // batch norm only
  Eigen::MatrixXd activation_input;  // argument of swish
};

struct ForwardCache {
  Mode mode = Mode::kTrain;
  bool batch_norm = false;
  std::vector<int> widths;
  std::vector<HiddenCache> hidden;
  Eigen::MatrixXd last_input;
};

// Affine -> (batch norm) -> swish for every hidden layer, then a final
// affine map. In train mode batch statistics are used and the running
// statistics are updated; eval mode reads the running statistics only.
// Throws ShapeError on input width mismatch and DomainError for n < 2 in
// batch-norm train mode.
Eigen::VectorXd Forward(NetworkParams& params, BatchView x, Mode mode,
                        ForwardCache* cache = nullptr);

// Forward pass that never mutates params. Train mode normalizes with batch
// statistics without folding them into the running averages.
Eigen::VectorXd Predict(const NetworkParams& params, BatchView x, Mode mode = Mode::kEval);

// Gradient of (1/n) sum_i r_i^2 with respect to every trainable tensor,
// where r = predictions - labels from the pass that produced `cache`.
ParamBlock Backward(const ForwardCache& cache, const NetworkParams& params,
                    const Eigen::VectorXd& residuals);

}  // namespace krq

#endif  // KRQ_NN_H_
