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

#ifndef DICM_OPTIMIZER_HPP_
#define DICM_OPTIMIZER_HPP_

#include <cstdint>
#include <vector>

#include "dicm/prob_models.hpp"
#include "dicm/rate_loss.hpp"
#include "dicm/tensor.hpp"
#include "dicm/toy_codec.hpp"

namespace dicm {

struct OptimConfig {
  double lambda = 10.0;
  int steps = 500;
  double step_size = 0.05;
  double sigma_delta = 0.05;
  double w_init = 0.5;
  std::uint64_t seed = 0;
};

// Per-element first-order fit of (w, mu, sigma) against
//   J = sum_i -log2 max(p_surrogate(y_i), 2^-24)
//       + lambda * N_pix * masked_mse(x, synthesize(y_tilde), m_dilated)
// where y_tilde_i = w_i * y_i + (1 - w_i) * round(mu_i) and the rounding
// gradient passes straight through. The distortion term sees the
// block-dilated mask (any-pixel rule), so blocks touching the mask stay
// fully protected. w is projected to [0.01, 0.99], mu is free, sigma is
// projected to >= kSigmaMin. mu starts at 0 and sigma at the floor: the
// rate term only engages elements the model can already explain;
// elsewhere the distortion term alone moves w.
struct OptimResult {
  std::vector<MixtureParams> params;    // final per-element state
  std::vector<double> objective_trace;  // J per step, finite everywhere
  Image weight_map;                     // per-block mean raw w, in [0, 1]
  std::vector<std::uint8_t> hardened;   // 1 = Gaussian, 0 = delta
  CoeffGrid coefficients;               // analyze(x) / q, padded grid
  std::uint32_t orig_width = 0;
  std::uint32_t orig_height = 0;
};

OptimResult optimize(const Image& x, const MaskImage& m,
                     const TransformSpec& spec, const OptimConfig& cfg);

// Same descent with w frozen at 1: the Gaussian-only comparison arm.
OptimResult baseline_gaussian(const Image& x, const MaskImage& m,
                              const TransformSpec& spec,
                              const OptimConfig& cfg);

// Symbols actually committed to the coder: Gaussian elements transmit the
// quantized coefficient, delta elements transmit the cell of mu. Values
// clamp to the coder support.
LatentTensor commit_latents(const OptimResult& r,
                            std::int32_t support_min,
                            std::int32_t support_max);

// Both arms coded through the real coder (hard delta at code time).
// bits_* are coded payload bits; the hardened-model flag block and the
// 16-bit parameter block are reported separately as side-info.
struct CompareRecord {
  double bits_mixture = 0.0;
  double bits_gaussian = 0.0;
  double mse_in_mask_mixture = 0.0;
  double mse_in_mask_gaussian = 0.0;
  double flag_bits = 0.0;       // 1 bit per element in the mixture arm
  double side_bits_mixture = 0.0;
  double side_bits_gaussian = 0.0;
  double masked_out_fraction = 0.0;
  // bits_mixture <= bits_gaussian whenever the mixture arm's masked-in
  // MSE is within 1.05x of the Gaussian arm's.
  bool dominance_holds = false;
};

CompareRecord compare(const Image& x, const MaskImage& m,
                      const TransformSpec& spec, const OptimConfig& cfg);

}  // namespace dicm

#endif  // DICM_OPTIMIZER_HPP_
