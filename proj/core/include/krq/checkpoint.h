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

#ifndef KRQ_CHECKPOINT_H_
#define KRQ_CHECKPOINT_H_

#include <filesystem>

#include "krq/nn.h"

namespace krq {

// Binary layout (little endian):
//   "KRQ1"  u32 layer_count
//   per layer l = 1..L:       weight (rank 2, N_l x N_{l-1}, row-major), bias (rank 1)
//   per batch-norm site:      scale, shift, running_mean, running_var (rank 1)
// Each tensor is u32 rank, rank x u32 dims, then f64 payload. The
// NetworkSpec is written to a JSON sidecar at `path` + ".json".
void SaveCheckpoint(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams LoadCheckpoint(const std::filesystem::path& path);

std::filesystem::path SidecarPath(const std::filesystem::path& path);

}  // namespace krq

#endif  // KRQ_CHECKPOINT_H_
