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

#include "dicm/rate_loss.hpp"

#include <cmath>
#include <string>

#include "dicm/errors.hpp"

namespace dicm {
namespace {

void require_same_dims(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorKind::kDimensionMismatch, "image dimensions disagree");
  }
}

}  // namespace

RateReport rate_estimate(const LatentTensor& latents,
                         const std::vector<ModelParams>& params,
                         std::uint64_t pixel_count) {
  if (latents.values.size() != params.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "latents hold " + std::to_string(latents.values.size()) +
                    " elements but " + std::to_string(params.size()) +
                    " parameter sets were given");
  }
  RateReport r;
  r.per_element_bits.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    double p = likelihood(latents.values[i], params[i]);
    double bits = -std::log2(std::max(p, kProbFloor));
    r.per_element_bits[i] = bits;
    r.total_bits += bits;
  }
  r.bpp = pixel_count > 0 ? r.total_bits / static_cast<double>(pixel_count)
                          : 0.0;
  return r;
}

double mse(const Image& x, const Image& x_hat) {
  require_same_dims(x, x_hat);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.pixels.size(); ++i) {
    double d = x.pixels[i] - x_hat.pixels[i];
    acc += d * d;
  }
  return x.pixels.empty() ? 0.0 : acc / static_cast<double>(x.pixels.size());
}

double masked_mse(const Image& x, const Image& x_hat, const MaskImage& m) {
  require_same_dims(x, x_hat);
  if (m.width != x.width || m.height != x.height) {
    throw Error(ErrorKind::kDimensionMismatch, "mask dimensions disagree");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.pixels.size(); ++i) {
    if (m.values[i]) {
      double d = x.pixels[i] - x_hat.pixels[i];
      acc += d * d;
    }
  }
  return x.pixels.empty() ? 0.0 : acc / static_cast<double>(x.pixels.size());
}

LossBreakdown loss_rd(double rate_y, double rate_z, const Image& x,
                      const Image& x_hat, double lambda) {
  LossBreakdown l;
  l.rate_y = rate_y;
  l.rate_z = rate_z;
  l.distortion = mse(x, x_hat);
  l.lambda1 = lambda;
  l.total = rate_y + rate_z + lambda * l.distortion;
  return l;
}

LossBreakdown loss_task(double rate_y, double rate_z, const Image& x,
                        const Image& x_hat, double lambda1, double lambda2,
                        double task_value) {
  LossBreakdown l;
  l.rate_y = rate_y;
  l.rate_z = rate_z;
  l.distortion = mse(x, x_hat);
  l.task_term = task_value;
  l.lambda1 = lambda1;
  l.lambda2 = lambda2;
  l.total = rate_y + rate_z + lambda1 * l.distortion + lambda2 * task_value;
  return l;
}

LossBreakdown loss_region(double rate_y, double rate_z, const Image& x,
                          const Image& x_hat, const MaskImage& m,
                          double lambda) {
  LossBreakdown l;
  l.rate_y = rate_y;
  l.rate_z = rate_z;
  l.distortion = masked_mse(x, x_hat, m);
  l.lambda1 = lambda;
  l.total = rate_y + rate_z + lambda * l.distortion;
  return l;
}

double surrogate_likelihood(double y, const MixtureParams& p,
                            double sigma_delta) {
  if (!(sigma_delta > 0.0) || !std::isfinite(sigma_delta)) {
    throw Error(ErrorKind::kInvalidParameter, "sigma_delta must be positive");
  }
  if (!std::isfinite(y)) {
    throw Error(ErrorKind::kInvalidParameter, "y must be finite");
  }
  // Reuses the mixture validity checks.
  (void)mixture_likelihood(0, p);
  return p.w * gaussian_bin(y, p.mu, p.sigma) +
         (1.0 - p.w) * gaussian_bin(y, p.mu, sigma_delta);
}

namespace {

// d/dmu and d/dsigma of the Gaussian unit-bin integral at real y.
void gaussian_bin_grads(double y, double mu, double sigma, double* d_mu,
                        double* d_sigma) {
  double hi = (y + 0.5 - mu) / sigma;
  double lo = (y - 0.5 - mu) / sigma;
  double phi_hi = std_normal_pdf(hi);
  double phi_lo = std_normal_pdf(lo);
  *d_mu = (phi_lo - phi_hi) / sigma;
  *d_sigma = (phi_lo * lo - phi_hi * hi) / sigma;
}

}  // namespace

SurrogateGrad surrogate_grad(double y, const MixtureParams& p,
                             double sigma_delta) {
  double gb_sigma = 0.0, gb_delta = 0.0;
  double s = surrogate_likelihood(y, p, sigma_delta);
  gb_sigma = gaussian_bin(y, p.mu, p.sigma);
  gb_delta = gaussian_bin(y, p.mu, sigma_delta);

  double dmu_s, dsig_s, dmu_d, dsig_d;
  gaussian_bin_grads(y, p.mu, p.sigma, &dmu_s, &dsig_s);
  gaussian_bin_grads(y, p.mu, sigma_delta, &dmu_d, &dsig_d);

  double ds_dw = gb_sigma - gb_delta;
  double ds_dmu = p.w * dmu_s + (1.0 - p.w) * dmu_d;
  double ds_dsigma = p.w * dsig_s;

  SurrogateGrad g;
  double denom = std::max(s, 1e-300) * kLn2;
  g.d_w = -ds_dw / denom;
  g.d_mu = -ds_dmu / denom;
  g.d_sigma = -ds_dsigma / denom;
  return g;
}

}  // namespace dicm
