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

#ifndef KRQ_OPTIMIZER_H_
#define KRQ_OPTIMIZER_H_

#include <cstdint>

#include "krq/nn.h"

namespace krq {

struct AdamWHyper {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Piecewise-constant learning rate driven by an exponentially smoothed loss.
// smoothing = 0 tracks the raw loss.
struct PlateauSchedule {
  double ratio = 0.4;
  int patience = 4000;
  double min_lr = 0.0;
  double smoothing = 0.99;
  double threshold = 1e-8;
};

struct OptimizerState {
  ParamBlock first_moment;
  ParamBlock second_moment;
  uint64_t step = 0;
  double lr = 0.0;
  // Plateau tracking.
  bool has_smoothed = false;
  double smoothed_loss = 0.0;
  double best_loss = 0.0;
  int bad_iterations = 0;
  int decays = 0;

  static OptimizerState Init(const NetworkParams& params, double lr);
};

// One AdamW update at state.lr. Weight decay is decoupled from the moment
// estimates; batch-norm running statistics are not touched.
void AdamWStep(NetworkParams& params, const ParamBlock& grads, OptimizerState& state,
               const AdamWHyper& hyper);

// Feeds one training loss into the plateau tracker. Once the smoothed loss
// has failed to improve on the best value by more than `threshold` for
// `patience` consecutive calls the learning rate is multiplied by `ratio`
// (never below min_lr) and the counter restarts. Throws DivergenceError on a
// non-finite loss.
void PlateauLr(OptimizerState& state, double loss, const PlateauSchedule& schedule);

}  // namespace krq

#endif  // KRQ_OPTIMIZER_H_
