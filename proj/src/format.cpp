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

#include "dicm/format.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dicm/errors.hpp"

namespace dicm {
namespace {

constexpr std::size_t kHeaderBytes = 4 + 1 + 1 + 1 + 12 + 8 + 8 + 8;
constexpr std::size_t kPreludeBytes = 4 + 4 + 8;

void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& v, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
  v.push_back(static_cast<std::uint8_t>(x));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    auto s = take(2);
    return static_cast<std::uint16_t>(s[0] | (s[1] << 8));
  }
  std::uint32_t u32() {
    auto s = take(4);
    return static_cast<std::uint32_t>(s[0]) | (static_cast<std::uint32_t>(s[1]) << 8) |
           (static_cast<std::uint32_t>(s[2]) << 16) |
           (static_cast<std::uint32_t>(s[3]) << 24);
  }
  std::uint64_t u64() {
    std::uint64_t lo = u32();
    std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > b_.size()) {
      throw Error(ErrorKind::kDecode, "truncated stream");
    }
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t measure(const Bitstream& s) { return s.payload_bit_length; }

std::vector<std::uint8_t> serialize(const Bitstream& s) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + s.param_block.size() + s.payload.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(s.header.version);
  out.push_back(static_cast<std::uint8_t>(s.header.model));
  out.push_back(s.header.precision);
  put_u32(out, s.header.channels);
  put_u32(out, s.header.height);
  put_u32(out, s.header.width);
  put_u32(out, static_cast<std::uint32_t>(s.header.support_min));
  put_u32(out, static_cast<std::uint32_t>(s.header.support_max));
  put_u64(out, s.param_block.size());
  put_u64(out, s.payload.size());
  out.insert(out.end(), s.param_block.begin(), s.param_block.end());
  out.insert(out.end(), s.payload.begin(), s.payload.end());
  return out;
}

Bitstream parse_bitstream(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::kDecode, "bad magic, not a DICM stream");
  }
  Bitstream s;
  s.header.version = r.u8();
  if (s.header.version != kFormatVersion) {
    throw Error(ErrorKind::kDecode,
                "unsupported version " + std::to_string(s.header.version));
  }
  std::uint8_t model = r.u8();
  if (model > static_cast<std::uint8_t>(StreamModel::kHardened)) {
    throw Error(ErrorKind::kDecode, "unknown model id " + std::to_string(model));
  }
  s.header.model = static_cast<StreamModel>(model);
  s.header.precision = r.u8();
  if (s.header.precision < 8 || s.header.precision > 24) {
    throw Error(ErrorKind::kDecode, "precision outside [8, 24]");
  }
  s.header.channels = r.u32();
  s.header.height = r.u32();
  s.header.width = r.u32();
  s.header.support_min = r.i32();
  s.header.support_max = r.i32();
  std::uint64_t param_len = r.u64();
  std::uint64_t payload_len = r.u64();
  if (r.remaining() < param_len + payload_len) {
    throw Error(ErrorKind::kDecode, "truncated stream");
  }
  auto pb = r.take(static_cast<std::size_t>(param_len));
  s.param_block.assign(pb.begin(), pb.end());
  auto pl = r.take(static_cast<std::size_t>(payload_len));
  s.payload.assign(pl.begin(), pl.end());
  s.payload_bit_length = 8 * payload_len;
  return s;
}

Bitstream read_bitstream_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return parse_bitstream(bytes);
}

void write_bitstream_file(const Bitstream& s, const std::string& path) {
  auto bytes = serialize(s);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kIo, "short write to " + path);
}

std::int16_t quantize_mu(double mu) {
  double v = std::round(mu * 64.0);
  v = std::min(std::max(v, -32768.0), 32767.0);
  return static_cast<std::int16_t>(v);
}
double dequantize_mu(std::int16_t q) { return static_cast<double>(q) / 64.0; }

std::uint16_t quantize_sigma(double sigma) {
  double v = std::round(sigma * 256.0);
  // 29/256 is the smallest grid point at or above the sigma floor.
  v = std::min(std::max(v, 29.0), 65535.0);
  return static_cast<std::uint16_t>(v);
}
double dequantize_sigma(std::uint16_t q) {
  return static_cast<double>(q) / 256.0;
}

std::uint16_t quantize_w(double w) {
  double v = std::round(w * 65535.0);
  v = std::min(std::max(v, 0.0), 65535.0);
  return static_cast<std::uint16_t>(v);
}
double dequantize_w(std::uint16_t q) {
  return static_cast<double>(q) / 65535.0;
}

ModelParams SideInfo::element_model(std::size_t i) const {
  switch (model) {
    case StreamModel::kGaussian:
      return GaussianParams{dequantize_mu(mu_q[i]),
                            dequantize_sigma(sigma_q[i])};
    case StreamModel::kDelta:
      return DeltaParams{dequantize_mu(mu_q[i])};
    case StreamModel::kMixture:
      return MixtureParams{dequantize_w(w_q[i]), dequantize_mu(mu_q[i]),
                           dequantize_sigma(sigma_q[i])};
    case StreamModel::kHardened:
      if (gaussian_flag[i]) {
        return GaussianParams{dequantize_mu(mu_q[i]),
                              dequantize_sigma(sigma_q[i])};
      }
      return DeltaParams{dequantize_mu(mu_q[i])};
  }
  throw Error(ErrorKind::kInternal, "unreachable model");
}

std::vector<std::uint8_t> SideInfo::serialize() const {
  std::vector<std::uint8_t> out;
  std::size_t n = mu_q.size();
  out.reserve(kPreludeBytes + 6 * n);
  put_u32(out, orig_width);
  put_u32(out, orig_height);
  put_u64(out, std::bit_cast<std::uint64_t>(q));
  if (model == StreamModel::kHardened) {
    std::size_t nbytes = (n + 7) / 8;
    std::vector<std::uint8_t> flags(nbytes, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (gaussian_flag[i]) flags[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    out.insert(out.end(), flags.begin(), flags.end());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (model == StreamModel::kMixture) put_u16(out, w_q[i]);
    put_u16(out, static_cast<std::uint16_t>(mu_q[i]));
    if (model != StreamModel::kDelta) put_u16(out, sigma_q[i]);
  }
  return out;
}

SideInfo SideInfo::parse(StreamModel model, std::span<const std::uint8_t> bytes,
                         std::uint64_t element_count) {
  Reader r(bytes);
  SideInfo s;
  s.model = model;
  s.orig_width = r.u32();
  s.orig_height = r.u32();
  s.q = std::bit_cast<double>(r.u64());
  if (!(s.q > 0.0) || !std::isfinite(s.q)) {
    throw Error(ErrorKind::kDecode, "invalid quantization step in stream");
  }
  std::size_t n = static_cast<std::size_t>(element_count);
  if (model == StreamModel::kHardened) {
    auto flags = r.take((n + 7) / 8);
    s.gaussian_flag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.gaussian_flag[i] = (flags[i / 8] >> (i % 8)) & 1u;
    }
  }
  s.mu_q.resize(n);
  if (model != StreamModel::kDelta) s.sigma_q.resize(n);
  if (model == StreamModel::kMixture) s.w_q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (model == StreamModel::kMixture) s.w_q[i] = r.u16();
    s.mu_q[i] = static_cast<std::int16_t>(r.u16());
    if (model != StreamModel::kDelta) s.sigma_q[i] = r.u16();
  }
  if (r.remaining() != 0) {
    throw Error(ErrorKind::kDecode, "param block has trailing bytes");
  }
  return s;
}

const PmfTable& TableCache::get(const SideInfo& side, std::size_t element) {
  std::uint64_t key = 0;
  switch (side.model) {
    case StreamModel::kGaussian:
      key = (static_cast<std::uint64_t>(side.mu_q[element]) & 0xFFFF) |
            (static_cast<std::uint64_t>(side.sigma_q[element]) << 16);
      key |= 0ull << 60;
      break;
    case StreamModel::kDelta:
      key = (static_cast<std::uint64_t>(side.mu_q[element]) & 0xFFFF);
      key |= 1ull << 60;
      break;
    case StreamModel::kMixture:
      key = (static_cast<std::uint64_t>(side.mu_q[element]) & 0xFFFF) |
            (static_cast<std::uint64_t>(side.sigma_q[element]) << 16) |
            (static_cast<std::uint64_t>(side.w_q[element]) << 32);
      key |= 2ull << 60;
      break;
    case StreamModel::kHardened:
      if (side.gaussian_flag[element]) {
        key = (static_cast<std::uint64_t>(side.mu_q[element]) & 0xFFFF) |
              (static_cast<std::uint64_t>(side.sigma_q[element]) << 16);
        key |= 0ull << 60;
      } else {
        key = (static_cast<std::uint64_t>(side.mu_q[element]) & 0xFFFF);
        key |= 1ull << 60;
      }
      break;
  }
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  PmfTable t = build_pmf(side.element_model(element), support_min_,
                         support_max_, precision_bits_);
  return cache_.emplace(key, std::move(t)).first->second;
}

}  // namespace dicm
