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

#include "krq/checkpoint.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "krq/error.h"

namespace krq {
namespace {

constexpr std::array<char, 4> kMagic = {'K', 'R', 'Q', '1'};

template <typename T>
void WriteLe(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T ReadLe(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw IoError("checkpoint truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

void WriteMatrix(std::ostream& out, const Eigen::MatrixXd& m) {
  WriteLe<uint32_t>(out, 2);
  WriteLe<uint32_t>(out, static_cast<uint32_t>(m.rows()));
  WriteLe<uint32_t>(out, static_cast<uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) WriteLe<double>(out, m(r, c));
  }
}

void WriteVector(std::ostream& out, const Eigen::VectorXd& v) {
  WriteLe<uint32_t>(out, 1);
  WriteLe<uint32_t>(out, static_cast<uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) WriteLe<double>(out, v[i]);
}

void ReadMatrix(std::istream& in, Eigen::MatrixXd& m) {
  if (ReadLe<uint32_t>(in) != 2) throw ShapeError("checkpoint: expected a rank-2 tensor");
  const auto rows = ReadLe<uint32_t>(in);
  const auto cols = ReadLe<uint32_t>(in);
  if (rows != m.rows() || cols != m.cols()) throw ShapeError("checkpoint: weight shape mismatch");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = ReadLe<double>(in);
  }
}

void ReadVector(std::istream& in, Eigen::VectorXd& v) {
  if (ReadLe<uint32_t>(in) != 1) throw ShapeError("checkpoint: expected a rank-1 tensor");
  if (ReadLe<uint32_t>(in) != v.size()) throw ShapeError("checkpoint: vector length mismatch");
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = ReadLe<double>(in);
}

}  // namespace

std::filesystem::path SidecarPath(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void SaveCheckpoint(const std::filesystem::path& path, const NetworkParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(kMagic.data(), kMagic.size());
  WriteLe<uint32_t>(out, static_cast<uint32_t>(params.trainable.dense.size()));
  for (const auto& layer : params.trainable.dense) {
    WriteMatrix(out, layer.weight);
    WriteVector(out, layer.bias);
  }
  for (std::size_t k = 0; k < params.trainable.norm.size(); ++k) {
    WriteVector(out, params.trainable.norm[k].scale);
    WriteVector(out, params.trainable.norm[k].shift);
    WriteVector(out, params.running[k].mean);
    WriteVector(out, params.running[k].var);
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());

  std::ofstream side(SidecarPath(path));
  if (!side) throw IoError("cannot write checkpoint sidecar for " + path.string());
  side << ToJson(params.spec).dump(2) << "\n";
}

NetworkParams LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream side(SidecarPath(path));
  if (!side) throw IoError("missing checkpoint sidecar " + SidecarPath(path).string());
  nlohmann::json spec_json;
  try {
    side >> spec_json;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("unreadable checkpoint sidecar: ") + e.what());
  }
  // Shapes come from a fresh initialization; payloads overwrite them.
  NetworkParams params = XavierInit(NetworkSpecFromJson(spec_json));

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError("not a KRQ1 checkpoint: " + path.string());
  }
  if (ReadLe<uint32_t>(in) != params.trainable.dense.size()) {
    throw ShapeError("checkpoint layer count does not match its sidecar");
  }
  for (auto& layer : params.trainable.dense) {
    ReadMatrix(in, layer.weight);
    ReadVector(in, layer.bias);
  }
  for (std::size_t k = 0; k < params.trainable.norm.size(); ++k) {
    ReadVector(in, params.trainable.norm[k].scale);
    ReadVector(in, params.trainable.norm[k].shift);
    ReadVector(in, params.running[k].mean);
    ReadVector(in, params.running[k].var);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("checkpoint has trailing bytes");
  return params;
}

}  // namespace krq
