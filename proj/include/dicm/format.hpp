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

#ifndef DICM_FORMAT_HPP_
#define DICM_FORMAT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dicm/coder.hpp"
#include "dicm/prob_models.hpp"

namespace dicm {

// .dicm stream layout, little-endian:
//   magic "DICM" (4 bytes)
//   version        u8  = 1
//   model id       u8  (StreamModel)
//   precision      u8  (table precision bits)
//   dims           3x u32 (channels, height, width of the latent tensor)
//   support        2x i32 (min, max symbol)
//   param length   u64 (bytes)
//   payload length u64 (bytes)
//   param block, payload
//
// The param block starts with a prelude (original pixel width u32,
// height u32, quantization step as IEEE f64 bits) followed by the
// per-element entropy parameters in 16-bit fixed point, so a stream
// decodes with no out-of-band state.

inline constexpr char kMagic[4] = {'D', 'I', 'C', 'M'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::int32_t kDefaultSupport = 255;
inline constexpr int kDefaultPrecision = 16;

enum class StreamModel : std::uint8_t {
  kGaussian = 0,  // per element: mu i16, sigma u16
  kDelta = 1,     // per element: mu i16
  kMixture = 2,   // per element: w u16, mu i16, sigma u16
  kHardened = 3,  // flag bitmap (1 = Gaussian), then mu i16, sigma u16 each
};

struct BitstreamHeader {
  std::uint8_t version = kFormatVersion;
  StreamModel model = StreamModel::kGaussian;
  std::uint8_t precision = kDefaultPrecision;
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::int32_t support_min = -kDefaultSupport;
  std::int32_t support_max = kDefaultSupport;

  std::uint64_t element_count() const {
    return static_cast<std::uint64_t>(channels) * height * width;
  }
};

struct Bitstream {
  BitstreamHeader header;
  std::vector<std::uint8_t> param_block;
  std::vector<std::uint8_t> payload;
  std::uint64_t payload_bit_length = 0;  // 8 * payload bytes, no padding
};

// Payload bit count: 8 * payload byte length minus declared padding
// (always zero in this format).
std::uint64_t measure(const Bitstream& s);

std::vector<std::uint8_t> serialize(const Bitstream& s);
Bitstream parse_bitstream(std::span<const std::uint8_t> bytes);

Bitstream read_bitstream_file(const std::string& path);
void write_bitstream_file(const Bitstream& s, const std::string& path);

// 16-bit fixed-point parameter grids. Encode-side tables are built from
// the dequantized values, so decode reproduces them bit-exactly.
//   mu:    i16, 1/64 steps, range +-512
//   sigma: u16, 1/256 steps, clamped up so dequantized sigma >= kSigmaMin
//   w:     u16, 1/65535 steps over [0, 1]
std::int16_t quantize_mu(double mu);
double dequantize_mu(std::int16_t q);
std::uint16_t quantize_sigma(double sigma);
double dequantize_sigma(std::uint16_t q);
std::uint16_t quantize_w(double w);
double dequantize_w(std::uint16_t q);

// Decoded side information: the per-element parameters a stream carries.
struct SideInfo {
  StreamModel model = StreamModel::kGaussian;
  std::uint32_t orig_width = 0;
  std::uint32_t orig_height = 0;
  double q = 1.0 / 32.0;
  std::vector<std::int16_t> mu_q;
  std::vector<std::uint16_t> sigma_q;   // gaussian, mixture, hardened
  std::vector<std::uint16_t> w_q;       // mixture only
  std::vector<std::uint8_t> gaussian_flag;  // hardened only, 0/1 per element

  std::size_t element_count() const { return mu_q.size(); }
  // Dequantized entropy model of one element.
  ModelParams element_model(std::size_t i) const;

  std::vector<std::uint8_t> serialize() const;
  static SideInfo parse(StreamModel model,
                        std::span<const std::uint8_t> bytes,
                        std::uint64_t element_count);
};

// Builds and memoizes PMF tables keyed by the quantized parameters of an
// element; identical parameters share one table.
class TableCache {
 public:
  TableCache(int precision_bits, std::int32_t support_min,
             std::int32_t support_max)
      : precision_bits_(precision_bits),
        support_min_(support_min),
        support_max_(support_max) {}

  const PmfTable& get(const SideInfo& side, std::size_t element);

  // Adapter for the coder.
  TableSupplier supplier(const SideInfo& side) {
    return [this, &side](std::size_t i) -> const PmfTable& {
      return get(side, i);
    };
  }

 private:
  int precision_bits_;
  std::int32_t support_min_;
  std::int32_t support_max_;
  std::unordered_map<std::uint64_t, PmfTable> cache_;
};

}  // namespace dicm

#endif  // DICM_FORMAT_HPP_
