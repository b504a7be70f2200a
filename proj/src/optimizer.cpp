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

#include "dicm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dicm/coder.hpp"
#include "dicm/errors.hpp"
#include "dicm/format.hpp"
#include "dicm/math.hpp"

namespace dicm {
namespace {

void validate(const OptimConfig& cfg) {
  if (!(cfg.lambda > 0.0) || !(cfg.step_size > 0.0) ||
      !(cfg.sigma_delta > 0.0) || cfg.steps <= 0) {
    throw Error(ErrorKind::kInvalidParameter,
                "optimizer config fields must be positive");
  }
  if (!(cfg.w_init > 0.0) || !(cfg.w_init < 1.0)) {
    throw Error(ErrorKind::kInvalidParameter, "w_init must lie in (0, 1)");
  }
}

OptimResult run_descent(const Image& x, const MaskImage& m,
                        const TransformSpec& spec, const OptimConfig& cfg,
                        bool freeze_w) {
  validate(cfg);
  if (m.width != x.width || m.height != x.height) {
    throw Error(ErrorKind::kDimensionMismatch,
                "mask dimensions do not match the image");
  }

  Image xp = pad_to_blocks(x);
  // Distortion follows the block-dilated mask (any-pixel rule): a block
  // with any masked-in pixel stays fully protected, so its content is
  // never traded away by a partially covered footprint.
  std::vector<std::uint8_t> mp = mask_to_latent_mask(m);
  CoeffGrid coeffs = analyze(x, spec);
  const std::size_t n = coeffs.v.size();
  const double gamma = cfg.step_size;
  const double lambda = cfg.lambda;
  const double q = spec.q;

  std::vector<double> w(n, freeze_w ? 1.0 : cfg.w_init);
  std::vector<double> mu(n, 0.0);
  std::vector<double> sigma(n, kSigmaMin);
  std::vector<double> trace(static_cast<std::size_t>(cfg.steps));

  CoeffGrid ytil;
  ytil.width = coeffs.width;
  ytil.height = coeffs.height;
  ytil.v.resize(n);
  CoeffGrid scaled = ytil;
  Image resid;
  resid.width = xp.width;
  resid.height = xp.height;
  resid.pixels.resize(xp.pixels.size());

  for (int step = 0; step < cfg.steps; ++step) {
    // Decode estimate: Gaussian share keeps the real coefficient, delta
    // share decodes the cell of mu (round with straight-through grad).
    for (std::size_t i = 0; i < n; ++i) {
      double r = round_half_away(mu[i]);
      ytil.v[i] = w[i] * coeffs.v[i] + (1.0 - w[i]) * r;
      scaled.v[i] = q * ytil.v[i];
    }
    Image xhat = inverse_blocks(scaled);
    double dist = 0.0;
    for (std::size_t i = 0; i < resid.pixels.size(); ++i) {
      double e = mp[i] ? xhat.pixels[i] - xp.pixels[i] : 0.0;
      resid.pixels[i] = e;
      dist += e * e;
    }
    CoeffGrid gback = forward_blocks(resid);

    double rate_bits = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double y = coeffs.v[i];
      MixtureParams mp_i{w[i], mu[i], sigma[i]};
      double p = surrogate_likelihood(y, mp_i, cfg.sigma_delta);
      rate_bits += -std::log2(std::max(p, kProbFloor));

      double gw = 0.0, gmu = 0.0, gsig = 0.0;
      if (p > kProbFloor) {
        SurrogateGrad g = surrogate_grad(y, mp_i, cfg.sigma_delta);
        gw = g.d_w;
        gmu = g.d_mu;
        gsig = g.d_sigma;
      }
      double gy = 2.0 * lambda * q * gback.v[i];
      double r = round_half_away(mu[i]);
      gw += gy * (y - r);
      gmu += gy * (1.0 - w[i]);

      if (!freeze_w) {
        w[i] = std::clamp(w[i] - gamma * gw, 0.01, 0.99);
      }
      mu[i] -= gamma * gmu;
      sigma[i] = std::max(kSigmaMin, sigma[i] - gamma * gsig);
    }

    double objective = rate_bits + lambda * dist;
    trace[static_cast<std::size_t>(step)] = objective;
    if (!std::isfinite(objective)) {
      throw Error(ErrorKind::kInternal,
                  "objective non-finite at step " + std::to_string(step));
    }
  }

  OptimResult r;
  r.params.resize(n);
  r.hardened.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.params[i] = MixtureParams{w[i], mu[i], sigma[i]};
    // Ties at the threshold harden to delta.
    r.hardened[i] = w[i] > 0.5 ? 1 : 0;
  }
  r.objective_trace = std::move(trace);
  r.coefficients = std::move(coeffs);
  r.orig_width = x.width;
  r.orig_height = x.height;

  std::uint32_t bw = r.coefficients.width / TransformSpec::kBlock;
  std::uint32_t bh = r.coefficients.height / TransformSpec::kBlock;
  r.weight_map.width = bw;
  r.weight_map.height = bh;
  r.weight_map.pixels.assign(static_cast<std::size_t>(bw) * bh, 0.0);
  for (std::uint32_t by = 0; by < bh; ++by) {
    for (std::uint32_t bx = 0; bx < bw; ++bx) {
      double acc = 0.0;
      for (std::uint32_t dy = 0; dy < TransformSpec::kBlock; ++dy) {
        for (std::uint32_t dx = 0; dx < TransformSpec::kBlock; ++dx) {
          std::size_t idx = static_cast<std::size_t>(
                                by * TransformSpec::kBlock + dy) *
                                r.coefficients.width +
                            bx * TransformSpec::kBlock + dx;
          acc += w[idx];
        }
      }
      r.weight_map.at(bx, by) = acc / 64.0;
    }
  }
  return r;
}

}  // namespace

OptimResult optimize(const Image& x, const MaskImage& m,
                     const TransformSpec& spec, const OptimConfig& cfg) {
  return run_descent(x, m, spec, cfg, /*freeze_w=*/false);
}

OptimResult baseline_gaussian(const Image& x, const MaskImage& m,
                              const TransformSpec& spec,
                              const OptimConfig& cfg) {
  return run_descent(x, m, spec, cfg, /*freeze_w=*/true);
}

LatentTensor commit_latents(const OptimResult& r, std::int32_t support_min,
                            std::int32_t support_max) {
  LatentTensor t;
  t.channels = 1;
  t.height = r.coefficients.height;
  t.width = r.coefficients.width;
  t.values.resize(r.coefficients.v.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    std::int32_t sym;
    if (r.hardened[i]) {
      sym = static_cast<std::int32_t>(round_half_away(r.coefficients.v[i]));
    } else {
      // The cell the decoder reproduces; must use the dequantized mu the
      // stream will carry.
      double mu_deq = dequantize_mu(quantize_mu(r.params[i].mu));
      sym = delta_cell(mu_deq);
    }
    t.values[i] = std::clamp(sym, support_min, support_max);
  }
  return t;
}

CompareRecord compare(const Image& x, const MaskImage& m,
                      const TransformSpec& spec, const OptimConfig& cfg) {
  OptimResult mix = optimize(x, m, spec, cfg);
  OptimResult gau = baseline_gaussian(x, m, spec, cfg);

  const std::int32_t smin = -kDefaultSupport;
  const std::int32_t smax = kDefaultSupport;

  auto side_of = [&](const OptimResult& r, StreamModel model) {
    SideInfo s;
    s.model = model;
    s.orig_width = r.orig_width;
    s.orig_height = r.orig_height;
    s.q = spec.q;
    std::size_t n = r.params.size();
    s.mu_q.resize(n);
    s.sigma_q.resize(n);
    if (model == StreamModel::kHardened) s.gaussian_flag = r.hardened;
    for (std::size_t i = 0; i < n; ++i) {
      s.mu_q[i] = quantize_mu(r.params[i].mu);
      s.sigma_q[i] = quantize_sigma(r.params[i].sigma);
    }
    return s;
  };

  SideInfo side_mix = side_of(mix, StreamModel::kHardened);
  SideInfo side_gau = side_of(gau, StreamModel::kGaussian);

  LatentTensor sym_mix = commit_latents(mix, smin, smax);
  LatentTensor sym_gau = commit_latents(gau, smin, smax);

  TableCache cache_mix(kDefaultPrecision, smin, smax);
  TableCache cache_gau(kDefaultPrecision, smin, smax);
  auto payload_mix = encode_symbols(sym_mix, cache_mix.supplier(side_mix));
  auto payload_gau = encode_symbols(sym_gau, cache_gau.supplier(side_gau));

  // Round-trip through the real decoder; reconstruction comes from the
  // decoded symbols.
  LatentTensor dec_mix =
      decode_symbols(payload_mix, 1, sym_mix.height, sym_mix.width,
                     cache_mix.supplier(side_mix));
  LatentTensor dec_gau =
      decode_symbols(payload_gau, 1, sym_gau.height, sym_gau.width,
                     cache_gau.supplier(side_gau));
  if (dec_mix.values != sym_mix.values || dec_gau.values != sym_gau.values) {
    throw Error(ErrorKind::kInternal, "coder round-trip mismatch in compare");
  }

  Image rec_mix = synthesize(dec_mix, spec, x.width, x.height);
  Image rec_gau = synthesize(dec_gau, spec, x.width, x.height);

  CompareRecord rec;
  rec.bits_mixture = 8.0 * static_cast<double>(payload_mix.size());
  rec.bits_gaussian = 8.0 * static_cast<double>(payload_gau.size());
  rec.mse_in_mask_mixture = masked_mse(x, rec_mix, m);
  rec.mse_in_mask_gaussian = masked_mse(x, rec_gau, m);
  rec.flag_bits = static_cast<double>(mix.params.size());
  rec.side_bits_mixture = 8.0 * static_cast<double>(side_mix.serialize().size());
  rec.side_bits_gaussian = 8.0 * static_cast<double>(side_gau.serialize().size());
  std::uint64_t out_px = 0;
  for (auto v : m.values) out_px += v == 0 ? 1 : 0;
  rec.masked_out_fraction =
      m.values.empty() ? 0.0
                       : static_cast<double>(out_px) /
                             static_cast<double>(m.values.size());
  rec.dominance_holds =
      rec.mse_in_mask_mixture <= 1.05 * rec.mse_in_mask_gaussian
          ? rec.bits_mixture <= rec.bits_gaussian
          : true;
  return rec;
}

}  // namespace dicm
