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
//
// Seeded synthetic test images built from integer coefficient planes, so
// every latent is either (near) zero or of magnitude >= 2 and the
// quantizer reproduces the plane exactly.

#ifndef DICM_TESTS_SYNTHETIC_HPP_
#define DICM_TESTS_SYNTHETIC_HPP_

#include <cstdint>
#include <random>

#include "dicm/toy_codec.hpp"

namespace synthetic {

// Latent-plane texture: per 8x8 block a DC near mid-gray plus `ac_count`
// AC coefficients of integer magnitude in [2, mag_max]. Blocks whose
// pixels would leave (0.02, 0.98) get their AC magnitudes halved (values
// that would fall under 2 are zeroed) until they fit.
inline dicm::Image latent_texture(std::uint32_t width, std::uint32_t height,
                                  std::uint64_t seed, int ac_count,
                                  int mag_max) {
  using namespace dicm;
  TransformSpec spec;
  CoeffGrid grid;
  grid.width = width;
  grid.height = height;
  grid.v.assign(static_cast<std::size_t>(width) * height, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dc_d(112, 144);
  std::uniform_int_distribution<int> mag_d(2, mag_max);
  std::uniform_int_distribution<int> pos_d(0, 63);
  std::uniform_int_distribution<int> sign_d(0, 1);

  for (std::uint32_t by = 0; by < height; by += 8) {
    for (std::uint32_t bx = 0; bx < width; bx += 8) {
      double block[64] = {0.0};
      block[0] = dc_d(rng);
      if (ac_count >= 63) {
        for (int pos = 1; pos < 64; ++pos) {
          block[pos] = (sign_d(rng) ? 1 : -1) * mag_d(rng);
        }
      } else {
        for (int k = 0; k < ac_count; ++k) {
          int pos = pos_d(rng);
          if (pos == 0) continue;
          block[pos] = (sign_d(rng) ? 1 : -1) * mag_d(rng);
        }
      }
      // Shrink until the block's pixels stay strictly inside (0.02, 0.98).
      for (int attempt = 0; attempt < 8; ++attempt) {
        CoeffGrid one;
        one.width = one.height = 8;
        one.v.assign(block, block + 64);
        for (auto& v : one.v) v *= spec.q;
        Image px = inverse_blocks(one);
        bool ok = true;
        for (double p : px.pixels) {
          if (p <= 0.02 || p >= 0.98) {
            ok = false;
            break;
          }
        }
        if (ok) break;
        for (int i = 1; i < 64; ++i) {
          double v = block[i];
          block[i] = std::abs(v) >= 4.0 ? std::trunc(v / 2.0) : 0.0;
        }
      }
      for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
          grid.v[static_cast<std::size_t>(by + u) * width + bx + v] =
              block[u * 8 + v];
        }
      }
    }
  }
  for (auto& v : grid.v) v *= spec.q;
  return inverse_blocks(grid);
}

// Mask that is 1 (must decode) on the left `in_fraction` share of columns.
inline dicm::MaskImage left_mask(std::uint32_t width, std::uint32_t height,
                                 double in_fraction) {
  dicm::MaskImage m;
  m.width = width;
  m.height = height;
  m.values.assign(static_cast<std::size_t>(width) * height, 0);
  std::uint32_t cut = static_cast<std::uint32_t>(width * in_fraction);
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < cut; ++x) {
      m.values[static_cast<std::size_t>(y) * width + x] = 1;
    }
  }
  return m;
}

inline dicm::MaskImage zero_mask(std::uint32_t width, std::uint32_t height) {
  dicm::MaskImage m;
  m.width = width;
  m.height = height;
  m.values.assign(static_cast<std::size_t>(width) * height, 0);
  return m;
}

}  // namespace synthetic

#endif  // DICM_TESTS_SYNTHETIC_HPP_
