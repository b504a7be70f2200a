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

#ifndef DICM_TOY_CODEC_HPP_
#define DICM_TOY_CODEC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dicm/tensor.hpp"

namespace dicm {

// Fixed 8x8 orthonormal type-II cosine transform standing in for a
// learned analysis/synthesis pair, with a uniform scalar quantizer.
struct TransformSpec {
  static constexpr std::uint32_t kBlock = 8;
  double q = 1.0 / 32.0;  // quantization step, > 0
};

// Real-valued coefficient plane on the padded (multiple-of-8) grid,
// blockwise in place: coefficient (u, v) of block (by, bx) lives at
// row by*8+u, col bx*8+v.
struct CoeffGrid {
  std::uint32_t width = 0;   // padded, multiple of 8
  std::uint32_t height = 0;  // padded, multiple of 8
  std::vector<double> v;
};

// Replicate-edge padding to the next multiple of 8 in each dimension.
Image pad_to_blocks(const Image& x);
MaskImage pad_to_blocks(const MaskImage& m);

// Orthonormal blockwise DCT pair on padded planes (no 1/q scaling).
// inverse_blocks(forward_blocks(p)) == p up to roundoff; the pair also
// serves as its own adjoint.
CoeffGrid forward_blocks(const Image& padded);
Image inverse_blocks(const CoeffGrid& coeffs);

// Forward transform of a (possibly unpadded) image with coefficients
// scaled by 1/q.
CoeffGrid analyze(const Image& x, const TransformSpec& spec);

// Round half away from zero to integers; latent dims (1, H, W) on the
// padded grid.
LatentTensor quantize(const CoeffGrid& coeffs);

// Inverse transform of q-rescaled coefficients, clamped to [0, 1] and
// cropped to (orig_width, orig_height).
Image synthesize(const LatentTensor& latents, const TransformSpec& spec,
                 std::uint32_t orig_width, std::uint32_t orig_height);
Image synthesize(const CoeffGrid& coeffs, const TransformSpec& spec,
                 std::uint32_t orig_width, std::uint32_t orig_height);

// Per-coefficient binary weights: a block is masked-in iff at least one
// pixel of its 8x8 footprint has m = 1; all 64 of its coefficients
// inherit weight 1.
std::vector<std::uint8_t> mask_to_latent_mask(const MaskImage& m);

// Binary PGM (P5, maxval 255). Masks threshold at 128.
Image read_pgm(const std::string& path);
void write_pgm(const Image& img, const std::string& path);
MaskImage read_mask_pgm(const std::string& path);
void write_mask_pgm(const MaskImage& m, const std::string& path);

}  // namespace dicm

#endif  // DICM_TOY_CODEC_HPP_
