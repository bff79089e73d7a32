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

#include "krq/optimizer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "krq/error.h"

namespace krq {

OptimizerState OptimizerState::Init(const NetworkParams& params, double lr) {
  OptimizerState state;
  state.first_moment = params.trainable.ZerosLike();
  state.second_moment = params.trainable.ZerosLike();
  state.lr = lr;
  return state;
}

void AdamWStep(NetworkParams& params, const ParamBlock& grads, OptimizerState& state,
               const AdamWHyper& hyper) {
  auto theta = params.trainable.Views();
  const auto g = grads.Views();
  auto m = state.first_moment.Views();
  auto v = state.second_moment.Views();
  if (theta.size() != g.size() || theta.size() != m.size() || theta.size() != v.size()) {
    throw ShapeError("optimizer tensors do not match parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(hyper.beta1, t);
  const double bias2 = 1.0 - std::pow(hyper.beta2, t);
  const double lr = state.lr;
  const double decay = 1.0 - lr * hyper.weight_decay;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (theta[k].size() != g[k].size()) throw ShapeError("gradient tensor shape mismatch");
    for (std::size_t i = 0; i < theta[k].size(); ++i) {
      const double gi = g[k][i];
      m[k][i] = hyper.beta1 * m[k][i] + (1.0 - hyper.beta1) * gi;
      v[k][i] = hyper.beta2 * v[k][i] + (1.0 - hyper.beta2) * gi * gi;
      const double m_hat = m[k][i] / bias1;
      const double v_hat = v[k][i] / bias2;
      theta[k][i] = theta[k][i] * decay - lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
  }
}

void PlateauLr(OptimizerState& state, double loss, const PlateauSchedule& schedule) {
  if (!std::isfinite(loss)) {
    throw DivergenceError("training diverged: loss is " + std::to_string(loss) + " at step " +
                          std::to_string(state.step));
  }
  if (!state.has_smoothed) {
    state.has_smoothed = true;
    state.smoothed_loss = loss;
    state.best_loss = loss;
    state.bad_iterations = 0;
    return;
  }
  state.smoothed_loss = schedule.smoothing * state.smoothed_loss + (1.0 - schedule.smoothing) * loss;
  if (state.smoothed_loss < state.best_loss - schedule.threshold) {
    state.best_loss = state.smoothed_loss;
    state.bad_iterations = 0;
    return;
  }
  if (++state.bad_iterations >= schedule.patience) {
    state.lr = std::max(schedule.min_lr, state.lr * schedule.ratio);
    ++state.decays;
    state.bad_iterations = 0;
  }
}

}  // namespace krq
