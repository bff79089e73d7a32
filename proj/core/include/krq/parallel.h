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

#ifndef KRQ_PARALLEL_H_
#define KRQ_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace krq {

// Worker count: KRQ_THREADS if set (minimum 1), otherwise the hardware
// concurrency.
int ThreadCount();

// Splits [0, n) into contiguous chunks and calls body(begin, end) on each,
// possibly concurrently. Callers write to disjoint output slots and reduce
// afterwards in index order, so results do not depend on the thread count.
void ParallelFor(std::size_t n,
                 const std::function<void(std::size_t, std::size_t)>& body,
                 std::size_t min_chunk = 256);

}  // namespace krq

#endif  // KRQ_PARALLEL_H_
