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

#ifndef DICM_RATE_LOSS_HPP_
#define DICM_RATE_LOSS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "dicm/prob_models.hpp"
#include "dicm/tensor.hpp"

namespace dicm {

// Likelihood floor for rate reporting: a hard delta gives probability 0
// off-cell, and -log2(0) would poison every aggregate. 2^-24 matches the
// coder's worst-case table cost region.
inline constexpr double kProbFloor = 0x1p-24;

struct RateReport {
  double total_bits = 0.0;
  std::vector<double> per_element_bits;
  double bpp = 0.0;
};

// Theoretical bitrate: per-element -log2(max(p, kProbFloor)) under each
// element's own model. pixel_count only scales bpp.
RateReport rate_estimate(const LatentTensor& latents,
                         const std::vector<ModelParams>& params,
                         std::uint64_t pixel_count);

// Mean over ALL pixels of (x*m - x_hat*m)^2; masked-out pixels contribute
// exact zeros to the sum but stay in the divisor.
double masked_mse(const Image& x, const Image& x_hat, const MaskImage& m);

double mse(const Image& x, const Image& x_hat);

struct LossBreakdown {
  double rate_y = 0.0;
  double rate_z = 0.0;
  double distortion = 0.0;
  std::optional<double> task_term;
  double lambda1 = 0.0;
  std::optional<double> lambda2;
  double total = 0.0;
};

// rate_y + rate_z + lambda * mse(x, x_hat)
LossBreakdown loss_rd(double rate_y, double rate_z, const Image& x,
                      const Image& x_hat, double lambda);

// rate_y + rate_z + lambda1 * mse + lambda2 * task_value; task_value is an
// externally supplied per-image scalar hook.
LossBreakdown loss_task(double rate_y, double rate_z, const Image& x,
                        const Image& x_hat, double lambda1, double lambda2,
                        double task_value);

// rate_y + rate_z + lambda * masked_mse(x, x_hat, m)
LossBreakdown loss_region(double rate_y, double rate_z, const Image& x,
                          const Image& x_hat, const MaskImage& m,
                          double lambda);

// Differentiable stand-in for the Gaussian+delta mixture likelihood used
// only inside the optimizer: the delta component is relaxed to a narrow
// Gaussian of scale sigma_delta, and the bin integral is evaluated at a
// real-valued point. Smooth in (w, mu, sigma); never used for coding.
double surrogate_likelihood(double y, const MixtureParams& p,
                            double sigma_delta);

struct SurrogateGrad {
  double d_w = 0.0;
  double d_mu = 0.0;
  double d_sigma = 0.0;
};

// Analytic gradient of -log2(surrogate_likelihood) in (w, mu, sigma).
SurrogateGrad surrogate_grad(double y, const MixtureParams& p,
                             double sigma_delta);

}  // namespace dicm

#endif  // DICM_RATE_LOSS_HPP_
