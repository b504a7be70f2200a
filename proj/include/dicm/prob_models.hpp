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

#ifndef DICM_PROB_MODELS_HPP_
#define DICM_PROB_MODELS_HPP_

#include <cstdint>
#include <variant>
#include <vector>

#include "dicm/math.hpp"

namespace dicm {

// Floor on every Gaussian scale. Below this the central quantization
// cell holds all but ~6e-6 of the mass and 16-bit frequency tables stop
// resolving the tails, so narrower scales buy nothing at the coder.
inline constexpr double kSigmaMin = 0.11;

struct GaussianParams {
  double mu = 0.0;
  double sigma = 1.0;
};

struct DeltaParams {
  double mu = 0.0;
};

struct MixtureParams {
  double w = 0.5;  // convex weight of the Gaussian component
  double mu = 0.0;
  double sigma = 1.0;
};

struct GmmComponent {
  double w = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
};

struct GmmParams {
  std::vector<GmmComponent> components;
};

using ModelParams =
    std::variant<GaussianParams, DeltaParams, MixtureParams, GmmParams>;

// Probability that a latent quantizes to the integer y_hat when it is
// distributed N(mu, sigma^2) convolved with U(-1/2, 1/2): the CDF
// difference across the unit cell around y_hat. Evaluated on the
// decaying erfc side so both tails keep relative accuracy.
double gaussian_likelihood(std::int32_t y_hat, const GaussianParams& p);

// Unit-cell mass of the delta distribution at mu: exactly 1 when
// mu lies in (y_hat - 1/2, y_hat + 1/2] and 0 otherwise. The boundary
// mu = k + 1/2 belongs to cell k.
double delta_likelihood(std::int32_t y_hat, const DeltaParams& p);

// w * gaussian + (1 - w) * delta.
double mixture_likelihood(std::int32_t y_hat, const MixtureParams& p);

// Convex combination of K discretized Gaussians.
double gmm_likelihood(std::int32_t y_hat, const GmmParams& p);

double likelihood(std::int32_t y_hat, const ModelParams& model);

// Gaussian unit-bin integral at a real-valued point; the training
// relaxation evaluates it off the integer grid.
double gaussian_bin(double y, double mu, double sigma);

// Fixed-precision discrete probability table over a bounded symbol
// support. Frequencies sum to exactly 2^precision_bits and every symbol
// keeps frequency >= 1 so any in-support symbol stays codable.
struct PmfTable {
  std::int32_t support_min = 0;
  std::vector<std::uint32_t> freqs;
  int precision_bits = 16;
  std::vector<std::uint32_t> cum;  // freqs.size() + 1 entries, cum.back() == total

  std::uint32_t total() const { return 1u << precision_bits; }
  std::int32_t support_max() const {
    return support_min + static_cast<std::int32_t>(freqs.size()) - 1;
  }
  bool contains(std::int32_t symbol) const {
    return symbol >= support_min && symbol <= support_max();
  }
  // Ideal code length of a symbol under this table, in bits.
  double ideal_bits(std::int32_t symbol) const;
};

// Evaluates the model at every support symbol, folds out-of-support tail
// mass into the edge symbols, and apportions 2^precision_bits integer
// frequency units by largest remainder with a >= 1 floor. Deficit or
// surplus after the floor is drained from the largest-frequency symbol
// (lowest index on ties). Pure function: identical inputs give identical
// tables.
PmfTable build_pmf(const ModelParams& model, std::int32_t s_min,
                   std::int32_t s_max, int precision_bits);

}  // namespace dicm

#endif  // DICM_PROB_MODELS_HPP_
