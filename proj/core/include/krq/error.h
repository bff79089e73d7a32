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

#ifndef KRQ_ERROR_H_
#define KRQ_ERROR_H_

#include <stdexcept>
#include <string>

namespace krq {

// Base class for every error raised by the library. The CLI maps the
// subclasses below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested dimension exceeds the bundled direction-number table.
class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

// Inconsistent tensor or batch shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

// Non-finite training loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// A sequential low-discrepancy stream ran past 2^32 points.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

// A reference estimate is not accurate enough for the requested study.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace krq

#endif  // KRQ_ERROR_H_
