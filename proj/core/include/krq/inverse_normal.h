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

#ifndef KRQ_INVERSE_NORMAL_H_
#define KRQ_INVERSE_NORMAL_H_

namespace krq {

// Standard normal CDF, evaluated through erfc for accuracy in both tails.
double NormalCdf(double z);

// Standard normal quantile. Acklam's rational approximation followed by one
// Halley step against the erfc-based CDF; |Phi(z) - u| is below 1e-9 across
// (0, 1). The upper half is computed by reflection, so
// InverseNormalCdf(u) == -InverseNormalCdf(1 - u) whenever 1 - u is exact.
// Throws DomainError unless 0 < u < 1.
double InverseNormalCdf(double u);

}  // namespace krq

#endif  // KRQ_INVERSE_NORMAL_H_
