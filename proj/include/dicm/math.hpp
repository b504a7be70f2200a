// Copyright 2026 The DICM Authors
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

#ifndef DICM_MATH_HPP_
#define DICM_MATH_HPP_

#include <cmath>
#include <cstdint>

namespace dicm {

// Complementary error function evaluated with W. J. Cody's rational
// Chebyshev approximations (three regimes: |x| <= 0.46875, (0.46875, 4],
// (4, 26.543)). Every caller on every platform runs the same fixed
// polynomial recurrences, so likelihoods and frequency tables do not
// depend on the platform libm. Absolute error < 3e-16 against a
// 50-digit reference; arguments past 26.543 underflow to 0.
double erfc_cody(double x);

// Standard normal CDF via erfc_cody.
inline double std_normal_cdf(double t) {
  return 0.5 * erfc_cody(-t * 0.70710678118654752440);
}

// Standard normal density.
inline double std_normal_pdf(double t) {
  return 0.39894228040143267794 * std::exp(-0.5 * t * t);
}

// Frozen quantizer convention: round half away from zero.
inline double round_half_away(double v) { return std::round(v); }

// The unique integer cell k with mu in (k - 1/2, k + 1/2]; the boundary
// mu = k + 1/2 belongs to cell k.
inline std::int32_t delta_cell(double mu) {
  return static_cast<std::int32_t>(std::ceil(mu - 0.5));
}

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kLn2 = 0.69314718055994530942;

}  // namespace dicm

#endif  // DICM_MATH_HPP_
