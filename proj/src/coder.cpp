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

#include "dicm/coder.hpp"

#include <string>

#include "dicm/errors.hpp"

namespace dicm {

namespace {
using u128 = unsigned __int128;
}

void RangeEncoder::shift_low() {
  std::uint32_t carry = static_cast<std::uint32_t>(low_ >> 64);
  std::uint8_t top = static_cast<std::uint8_t>(
      static_cast<std::uint64_t>(low_) >> 56);
  if (carry == 0 && top == 0xFF) {
    ++pending_ff_;
  } else {
    if (have_cache_) {
      out_->push_back(static_cast<std::uint8_t>(cache_ + carry));
    } else if (carry) {
      // Carry ripples past every pending 0xFF into the implicit leading
      // zero byte.
      out_->push_back(1);
    }
    for (; pending_ff_ > 0; --pending_ff_) {
      out_->push_back(static_cast<std::uint8_t>(0xFF + carry));
    }
    cache_ = top;
    have_cache_ = true;
  }
  low_ = (low_ & ((kTop) - 1)) << 8;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq,
                          int precision_bits) {
  std::uint64_t lo = static_cast<std::uint64_t>(
      (static_cast<u128>(range_) * cum) >> precision_bits);
  std::uint64_t wd = static_cast<std::uint64_t>(
      (static_cast<u128>(range_) * freq) >> precision_bits);
  low_ += lo;
  range_ = wd;
  while (range_ < kTop) {
    shift_low();
    range_ <<= 8;
  }
}

void RangeEncoder::finish() {
  // Resolve the delayed bytes together with any outstanding carry.
  std::uint32_t carry = static_cast<std::uint32_t>(low_ >> 64);
  if (have_cache_) {
    out_->push_back(static_cast<std::uint8_t>(cache_ + carry));
  } else if (carry) {
    out_->push_back(1);
  }
  for (; pending_ff_ > 0; --pending_ff_) {
    out_->push_back(static_cast<std::uint8_t>(0xFF + carry));
  }
  have_cache_ = false;

  // Emit bytes of low until one differs from the corresponding byte of
  // low + range; an all-0xFF continuation then stays inside the interval.
  std::uint64_t lo64 = static_cast<std::uint64_t>(low_);
  u128 top = static_cast<u128>(lo64) + range_;
  if ((top >> 64) != 0) {
    out_->push_back(static_cast<std::uint8_t>(lo64 >> 56));
    return;
  }
  std::uint64_t t64 = static_cast<std::uint64_t>(top);
  for (int shift = 56; shift >= 0; shift -= 8) {
    std::uint8_t lb = static_cast<std::uint8_t>(lo64 >> shift);
    out_->push_back(lb);
    if (static_cast<std::uint8_t>(t64 >> shift) != lb) break;
  }
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> data) : data_(data) {
  for (int i = 0; i < 8; ++i) {
    code_ = (code_ << 8) | next();
  }
}

std::size_t RangeDecoder::decode(const PmfTable& table) {
  int p = table.precision_bits;
  auto bound = [&](std::size_t idx) {
    return static_cast<std::uint64_t>(
        (static_cast<u128>(range_) * table.cum[idx]) >> p);
  };
  // Largest s with bound(s) <= code_.
  std::size_t lo = 0;
  std::size_t hi = table.freqs.size();
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (bound(mid) <= code_) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::uint64_t base = bound(lo);
  std::uint64_t wd = static_cast<std::uint64_t>(
      (static_cast<u128>(range_) * table.freqs[lo]) >> p);
  if (code_ - base >= wd) {
    throw Error(ErrorKind::kDecode, "corrupt payload: codepoint in dead zone");
  }
  code_ -= base;
  range_ = wd;
  while (range_ < kTop) {
    code_ = (code_ << 8) | next();
    range_ <<= 8;
  }
  return lo;
}

std::vector<std::uint8_t> encode_symbols(const LatentTensor& symbols,
                                         const TableSupplier& tables) {
  std::vector<std::uint8_t> out;
  if (symbols.values.empty()) return out;
  RangeEncoder enc(&out);
  for (std::size_t i = 0; i < symbols.values.size(); ++i) {
    const PmfTable& t = tables(i);
    std::int32_t v = symbols.values[i];
    if (!t.contains(v)) {
      throw Error(ErrorKind::kEncode,
                  "element " + std::to_string(i) + ": symbol " +
                      std::to_string(v) + " outside table support [" +
                      std::to_string(t.support_min) + ", " +
                      std::to_string(t.support_max()) + "]");
    }
    std::size_t idx = static_cast<std::size_t>(v - t.support_min);
    enc.encode(t.cum[idx], t.freqs[idx], t.precision_bits);
  }
  enc.finish();
  return out;
}

LatentTensor decode_symbols(std::span<const std::uint8_t> payload,
                            std::uint32_t channels, std::uint32_t height,
                            std::uint32_t width, const TableSupplier& tables) {
  LatentTensor t;
  t.channels = channels;
  t.height = height;
  t.width = width;
  std::uint64_t n =
      static_cast<std::uint64_t>(channels) * height * width;
  t.values.resize(n);
  if (n == 0) return t;
  RangeDecoder dec(payload);
  for (std::uint64_t i = 0; i < n; ++i) {
    const PmfTable& table = tables(static_cast<std::size_t>(i));
    std::size_t idx = dec.decode(table);
    t.values[i] = table.support_min + static_cast<std::int32_t>(idx);
  }
  return t;
}

double ideal_bits(const LatentTensor& symbols, const TableSupplier& tables) {
  double acc = 0.0;
  for (std::size_t i = 0; i < symbols.values.size(); ++i) {
    acc += tables(i).ideal_bits(symbols.values[i]);
  }
  return acc;
}

}  // namespace dicm
