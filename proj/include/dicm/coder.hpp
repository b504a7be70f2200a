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

#ifndef DICM_CODER_HPP_
#define DICM_CODER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dicm/prob_models.hpp"
#include "dicm/tensor.hpp"

namespace dicm {

// Byte-renormalizing range coder. 64-bit range register renormalized at
// 2^56; the low accumulator carries the 64 window bits plus the carry
// bit, and carries propagate through a delayed byte plus a pending run
// of 0xFF bytes. Symbol intervals are
//   [ (range*cum)>>P , (range*cum)>>P + (range*freq)>>P )
// so no symbol ever receives more code space than freq/2^P. The floor
// slack (at most 2^-32 of the range per symbol) stays unassigned and
// decodes as a corrupt-stream error.
// Encoder and decoder are single-stream state machines; distinct
// instances may run concurrently (one stream per channel is the
// supported parallel pattern).
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<std::uint8_t>* out) : out_(out) {}

  // cum and freq are taken from a PmfTable with total 2^precision_bits;
  // freq >= 1 and cum + freq <= 2^precision_bits.
  void encode(std::uint32_t cum, std::uint32_t freq, int precision_bits);

  // Emits the delayed bytes plus the shortest prefix of `low` that pins a
  // codepoint inside the final interval assuming 0xFF padding past the
  // end of the stream.
  void finish();

 private:
  void shift_low();

  static constexpr std::uint64_t kTop = 1ull << 56;

  std::vector<std::uint8_t>* out_;
  unsigned __int128 low_ = 0;
  std::uint64_t range_ = ~0ull;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ff_ = 0;
  bool have_cache_ = false;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> data);

  // Returns the index into the table's support of the next symbol.
  std::size_t decode(const PmfTable& table);

 private:
  std::uint8_t next() {
    return pos_ < data_.size() ? data_[pos_++] : 0xFF;
  }

  static constexpr std::uint64_t kTop = 1ull << 56;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint64_t code_ = 0;  // codepoint minus low, 64-bit window
  std::uint64_t range_ = ~0ull;
};

// Per-element table supplier; must be reproducible identically on the
// decode side from header plus side info.
using TableSupplier = std::function<const PmfTable&(std::size_t)>;

// Encodes values[0..n) under their tables. An empty tensor produces an
// empty payload. Out-of-support symbols raise an encode error naming the
// element index.
std::vector<std::uint8_t> encode_symbols(const LatentTensor& symbols,
                                         const TableSupplier& tables);

// Exact inverse given an identical supplier.
LatentTensor decode_symbols(std::span<const std::uint8_t> payload,
                            std::uint32_t channels, std::uint32_t height,
                            std::uint32_t width, const TableSupplier& tables);

// Sum of ideal table code lengths, in bits.
double ideal_bits(const LatentTensor& symbols, const TableSupplier& tables);

}  // namespace dicm

#endif  // DICM_CODER_HPP_
