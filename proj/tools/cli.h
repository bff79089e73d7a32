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

#ifndef KRQ_TOOLS_CLI_H_
#define KRQ_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace krq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitPrecision = 4;

// Entry point of the `krq` binary. Never throws; module errors become a
// one-line diagnostic on `err` and a nonzero exit code.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "6..13" -> {6, 13}; a single integer "7" -> {7, 7}.
std::pair<long long, long long> ParseRange(const std::string& text);

}  // namespace krq::cli

#endif  // KRQ_TOOLS_CLI_H_
