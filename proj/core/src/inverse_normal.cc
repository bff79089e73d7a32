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

#include "krq/inverse_normal.h"

#include <cmath>
#include <numbers>
#include <string>

#include "krq/error.h"

namespace krq {
namespace {

constexpr double kLowBreak = 0.02425;

// Rational approximation for 0 < u <= 0.5.
double LowerHalfApprox(double u) {
  if (u < kLowBreak) {
    constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                            -2.400758277161838e+00, -2.549732539343734e+00,
                            4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                            2.445134137142996e+00, 3.754408661907416e+00};
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double LowerHalf(double u) {
  double z = LowerHalfApprox(u);
  // Halley refinement.
  const double e = NormalCdf(z) - u;
  const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
  z -= step / (1.0 + 0.5 * z * step);
  return z;
}

}  // namespace

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double InverseNormalCdf(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("inverse normal CDF requires 0 < u < 1, got " + std::to_string(u));
  }
  if (u == 0.5) return 0.0;
  if (u < 0.5) return LowerHalf(u);
  return -LowerHalf(1.0 - u);  // exact subtraction for u >= 0.5
}

}  // namespace krq
