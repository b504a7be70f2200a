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

#ifndef DICM_TENSOR_HPP_
#define DICM_TENSOR_HPP_

#include <cstdint>
#include <vector>

namespace dicm {

// Integer-quantized latent features, row-major in (channel, row, col)
// order. These are the symbols handed to the range coder.
struct LatentTensor {
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::int32_t> values;

  std::size_t size() const { return values.size(); }
  bool dims_match_values() const {
    return static_cast<std::uint64_t>(channels) * height * width ==
           values.size();
  }
};

// Grayscale image, pixels in [0, 1], row-major.
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> pixels;

  double at(std::uint32_t x, std::uint32_t y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  double& at(std::uint32_t x, std::uint32_t y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

// Binary region map aligned to an image; 1 marks pixels that must decode
// faithfully, 0 marks pixels the codec may suppress.
struct MaskImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> values;  // each 0 or 1

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

MaskImage all_ones_mask(std::uint32_t width, std::uint32_t height);

}  // namespace dicm

#endif  // DICM_TENSOR_HPP_
