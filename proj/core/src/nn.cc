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

#include "krq/nn.h"

#include <cmath>
#include <string>

#include "krq/error.h"
#include "krq/hash.h"

namespace krq {
namespace {

Eigen::MatrixXd ApplySwish(const Eigen::MatrixXd& a) { return a.unaryExpr(&Swish); }

}  // namespace

void NetworkSpec::Validate() const {
  if (widths.size() < 3) throw ConfigError("network needs at least two affine layers");
  for (int w : widths) {
    if (w < 1) throw ConfigError("network widths must be positive");
  }
  if (widths.back() != 1) throw ConfigError("network output width must be 1");
}

NetworkSpec NetworkSpec::ForInputDim(int d, int width_factor, int depth, bool batch_norm,
                                     uint64_t seed) {
  NetworkSpec spec;
  spec.widths.push_back(d);
  for (int l = 1; l < depth; ++l) spec.widths.push_back(width_factor * d);
  spec.widths.push_back(1);
  spec.batch_norm = batch_norm;
  spec.seed = seed;
  spec.Validate();
  return spec;
}

nlohmann::json ToJson(const NetworkSpec& spec) {
  return {{"widths", spec.widths}, {"batch_norm", spec.batch_norm}, {"seed", spec.seed}};
}

NetworkSpec NetworkSpecFromJson(const nlohmann::json& j) {
  NetworkSpec spec;
  try {
    spec.widths = j.at("widths").get<std::vector<int>>();
    spec.batch_norm = j.value("batch_norm", true);
    spec.seed = j.value("seed", uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("network spec: ") + e.what());
  }
  spec.Validate();
  return spec;
}

std::vector<std::span<double>> ParamBlock::Views() {
  std::vector<std::span<double>> views;
  for (auto& layer : dense) {
    views.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    views.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  for (auto& site : norm) {
    views.emplace_back(site.scale.data(), static_cast<std::size_t>(site.scale.size()));
    views.emplace_back(site.shift.data(), static_cast<std::size_t>(site.shift.size()));
  }
  return views;
}

std::vector<std::span<const double>> ParamBlock::Views() const {
  std::vector<std::span<const double>> views;
  for (const auto& layer : dense) {
    views.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    views.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  for (const auto& site : norm) {
    views.emplace_back(site.scale.data(), static_cast<std::size_t>(site.scale.size()));
    views.emplace_back(site.shift.data(), static_cast<std::size_t>(site.shift.size()));
  }
  return views;
}

std::size_t ParamBlock::size() const {
  std::size_t total = 0;
  for (const auto& v : Views()) total += v.size();
  return total;
}

ParamBlock ParamBlock::ZerosLike() const {
  ParamBlock out;
  for (const auto& layer : dense) {
    out.dense.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                         Eigen::VectorXd::Zero(layer.bias.size())});
  }
  for (const auto& site : norm) {
    out.norm.push_back({Eigen::VectorXd::Zero(site.scale.size()),
                        Eigen::VectorXd::Zero(site.shift.size())});
  }
  return out;
}

std::size_t NetworkParams::ParameterCount() const {
  std::size_t count = 0;
  const auto& w = spec.widths;
  for (std::size_t l = 1; l < w.size(); ++l) {
    count += static_cast<std::size_t>(w[l]) * static_cast<std::size_t>(w[l - 1]) +
             static_cast<std::size_t>(w[l]);
  }
  for (const auto& site : trainable.norm) count += 4 * static_cast<std::size_t>(site.scale.size());
  return count;
}

NetworkParams XavierInit(const NetworkSpec& spec) {
  spec.Validate();
  NetworkParams params;
  params.spec = spec;
  CounterRng rng(HashCombine(spec.seed, 0x58415649ULL));
  const int layers = spec.num_layers();
  for (int l = 1; l <= layers; ++l) {
    const int fan_in = spec.widths[l - 1];
    const int fan_out = spec.widths[l];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    // Row-major fill so the draw order is independent of storage order.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = bound * (2.0 * rng.NextUniform() - 1.0);
    }
    params.trainable.dense.push_back(std::move(layer));
    if (spec.batch_norm && l < layers) {
      params.trainable.norm.push_back(
          {Eigen::VectorXd::Ones(fan_out), Eigen::VectorXd::Zero(fan_out)});
      params.running.push_back({Eigen::VectorXd::Zero(fan_out), Eigen::VectorXd::Ones(fan_out)});
    }
  }
  return params;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Swish(double x) { return x * Sigmoid(x); }

double SwishGrad(double x) {
  const double sig = Sigmoid(x);
  const double value = x * sig;
  return value + sig * (1.0 - value);
}

namespace {

// Shared forward pass. Running statistics are written to `running_out`
// (when non-null) in train mode.
Eigen::VectorXd ForwardImpl(const NetworkParams& params, BatchView x, Mode mode,
                            ForwardCache* cache, std::vector<RunningStats>* running_out) {
  const NetworkSpec& spec = params.spec;
  const int layers = spec.num_layers();
  if (x.rows() != spec.input_dim()) {
    throw ShapeError("batch has " + std::to_string(x.rows()) + " features, network expects " +
                     std::to_string(spec.input_dim()));
  }
  const Eigen::Index n = x.cols();
  const bool train_norm = spec.batch_norm && mode == Mode::kTrain;
  if (train_norm && n < 2) {
    throw DomainError("batch normalization in train mode needs at least 2 samples");
  }
  if (cache != nullptr) {
    cache->mode = mode;
    cache->batch_norm = spec.batch_norm;
    cache->widths = spec.widths;
    cache->hidden.assign(static_cast<std::size_t>(layers - 1), {});
  }

  Eigen::MatrixXd h = x;
  for (int l = 0; l < layers - 1; ++l) {
    const DenseLayer& layer = params.trainable.dense[static_cast<std::size_t>(l)];
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    HiddenCache* hc = cache != nullptr ? &cache->hidden[static_cast<std::size_t>(l)] : nullptr;
    Eigen::MatrixXd a;
    if (spec.batch_norm) {
      const NormAffine& affine = params.trainable.norm[static_cast<std::size_t>(l)];
      const RunningStats& running = params.running[static_cast<std::size_t>(l)];
      Eigen::VectorXd mean, inv_std;
      if (train_norm) {
        mean = z.rowwise().mean();
        const Eigen::VectorXd var =
            (z.colwise() - mean).array().square().rowwise().mean().matrix();
        inv_std = (var.array() + kBatchNormEpsilon).rsqrt().matrix();
        if (running_out != nullptr) {
          const double nd = static_cast<double>(n);
          RunningStats& updated = (*running_out)[static_cast<std::size_t>(l)];
          updated.mean = kBatchNormMomentum * running.mean + (1.0 - kBatchNormMomentum) * mean;
          updated.var = kBatchNormMomentum * running.var +
                        (1.0 - kBatchNormMomentum) * (var * (nd / (nd - 1.0)));
        }
      } else {
        mean = running.mean;
        inv_std = (running.var.array() + kBatchNormEpsilon).rsqrt().matrix();
      }
      Eigen::MatrixXd normalized = (z.colwise() - mean).array().colwise() * inv_std.array();
      a = (normalized.array().colwise() * affine.scale.array()).matrix();
      a.colwise() += affine.shift;
      if (hc != nullptr) {
        hc->normalized = std::move(normalized);
        hc->inv_std = std::move(inv_std);
      }
    } else {
      a = std::move(z);
    }
    Eigen::MatrixXd next = ApplySwish(a);
    if (hc != nullptr) {
      hc->input = std::move(h);
      hc->activation_input = std::move(a);
    }
    h = std::move(next);
  }
  const DenseLayer& last = params.trainable.dense.back();
  Eigen::MatrixXd out = last.weight * h;
  out.colwise() += last.bias;
  if (cache != nullptr) cache->last_input = std::move(h);
  return out.row(0).transpose();
}

}  // namespace

Eigen::VectorXd Forward(NetworkParams& params, BatchView x, Mode mode, ForwardCache* cache) {
  return ForwardImpl(params, x, mode, cache, mode == Mode::kTrain ? &params.running : nullptr);
}

Eigen::VectorXd Predict(const NetworkParams& params, BatchView x, Mode mode) {
  return ForwardImpl(params, x, mode, nullptr, nullptr);
}

ParamBlock Backward(const ForwardCache& cache, const NetworkParams& params,
                    const Eigen::VectorXd& residuals) {
  const NetworkSpec& spec = params.spec;
  const int layers = spec.num_layers();
  if (cache.widths != spec.widths || cache.batch_norm != spec.batch_norm ||
      static_cast<int>(cache.hidden.size()) != layers - 1) {
    throw ShapeError("forward cache does not match network parameters");
  }
  const Eigen::Index n = cache.last_input.cols();
  if (residuals.size() != n) {
    throw ShapeError("residual count " + std::to_string(residuals.size()) +
                     " != batch size " + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  ParamBlock grads = params.trainable.ZerosLike();

  Eigen::MatrixXd delta = (2.0 / nd) * residuals.transpose();  // 1 x n
  {
    DenseLayer& g = grads.dense.back();
    g.weight = delta * cache.last_input.transpose();
    g.bias = delta.rowwise().sum();
  }
  Eigen::MatrixXd upstream = params.trainable.dense.back().weight.transpose() * delta;

  for (int l = layers - 2; l >= 0; --l) {
    const HiddenCache& hc = cache.hidden[static_cast<std::size_t>(l)];
    Eigen::MatrixXd da =
        upstream.cwiseProduct(hc.activation_input.unaryExpr(&SwishGrad));
    Eigen::MatrixXd dz;
    if (spec.batch_norm) {
      const NormAffine& affine = params.trainable.norm[static_cast<std::size_t>(l)];
      NormAffine& g = grads.norm[static_cast<std::size_t>(l)];
      g.scale = da.cwiseProduct(hc.normalized).rowwise().sum();
      g.shift = da.rowwise().sum();
      const Eigen::MatrixXd dxhat = (da.array().colwise() * affine.scale.array()).matrix();
      if (cache.mode == Mode::kTrain) {
        const Eigen::VectorXd sum_dxhat = dxhat.rowwise().sum();
        const Eigen::VectorXd sum_dxhat_xhat = dxhat.cwiseProduct(hc.normalized).rowwise().sum();
        Eigen::MatrixXd centered = nd * dxhat;
        centered.colwise() -= sum_dxhat;
        centered -= (hc.normalized.array().colwise() * sum_dxhat_xhat.array()).matrix();
        dz = (centered.array().colwise() * (hc.inv_std.array() / nd)).matrix();
      } else {
        dz = (dxhat.array().colwise() * hc.inv_std.array()).matrix();
      }
    } else {
      dz = std::move(da);
    }
    DenseLayer& g = grads.dense[static_cast<std::size_t>(l)];
    g.weight = dz * hc.input.transpose();
    g.bias = dz.rowwise().sum();
    upstream = params.trainable.dense[static_cast<std::size_t>(l)].weight.transpose() * dz;
  }
  return grads;
}

}  // namespace krq
