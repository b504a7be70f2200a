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

#include "dicm/pipeline.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "dicm/coder.hpp"
#include "dicm/errors.hpp"

#include "json.hpp"

namespace dicm {

EncodeArtifacts encode_image(const Image& x, const MaskImage& m,
                             const TransformSpec& spec, const OptimConfig& cfg,
                             const EncodeOptions& opts) {
  if (opts.support <= 0) {
    throw Error(ErrorKind::kInvalidParameter, "support bound must be positive");
  }
  EncodeArtifacts a;
  a.optim = opts.gaussian_only ? baseline_gaussian(x, m, spec, cfg)
                               : optimize(x, m, spec, cfg);

  StreamModel model;
  if (opts.gaussian_only) {
    model = StreamModel::kGaussian;
  } else if (opts.soft) {
    model = StreamModel::kMixture;
  } else {
    model = StreamModel::kHardened;
  }

  SideInfo side;
  side.model = model;
  side.orig_width = x.width;
  side.orig_height = x.height;
  side.q = spec.q;
  std::size_t n = a.optim.params.size();
  side.mu_q.resize(n);
  if (model != StreamModel::kDelta) side.sigma_q.resize(n);
  if (model == StreamModel::kMixture) side.w_q.resize(n);
  if (model == StreamModel::kHardened) side.gaussian_flag = a.optim.hardened;
  for (std::size_t i = 0; i < n; ++i) {
    side.mu_q[i] = quantize_mu(a.optim.params[i].mu);
    if (model != StreamModel::kDelta) {
      side.sigma_q[i] = quantize_sigma(a.optim.params[i].sigma);
    }
    if (model == StreamModel::kMixture) {
      side.w_q[i] = quantize_w(a.optim.params[i].w);
    }
  }

  a.committed = commit_latents(a.optim, -opts.support, opts.support);

  TableCache cache(opts.precision, -opts.support, opts.support);
  auto payload = encode_symbols(a.committed, cache.supplier(side));

  a.stream.header.model = model;
  a.stream.header.precision = static_cast<std::uint8_t>(opts.precision);
  a.stream.header.channels = 1;
  a.stream.header.height = a.committed.height;
  a.stream.header.width = a.committed.width;
  a.stream.header.support_min = -opts.support;
  a.stream.header.support_max = opts.support;
  a.stream.param_block = side.serialize();
  a.stream.payload_bit_length = 8 * payload.size();
  a.stream.payload = std::move(payload);
  a.side = std::move(side);
  return a;
}

LatentTensor decode_latents(const Bitstream& s) {
  SideInfo side = SideInfo::parse(s.header.model, s.param_block,
                                  s.header.element_count());
  TableCache cache(s.header.precision, s.header.support_min,
                   s.header.support_max);
  return decode_symbols(s.payload, s.header.channels, s.header.height,
                        s.header.width, cache.supplier(side));
}

Image decode_image(const Bitstream& s) {
  SideInfo side = SideInfo::parse(s.header.model, s.param_block,
                                  s.header.element_count());
  if (s.header.channels != 1) {
    throw Error(ErrorKind::kDecode, "image streams carry one channel");
  }
  TableCache cache(s.header.precision, s.header.support_min,
                   s.header.support_max);
  LatentTensor latents =
      decode_symbols(s.payload, s.header.channels, s.header.height,
                     s.header.width, cache.supplier(side));
  TransformSpec spec;
  spec.q = side.q;
  std::uint32_t ow = side.orig_width ? side.orig_width : latents.width;
  std::uint32_t oh = side.orig_height ? side.orig_height : latents.height;
  return synthesize(latents, spec, ow, oh);
}

StreamRate stream_rate(const Bitstream& s) {
  SideInfo side = SideInfo::parse(s.header.model, s.param_block,
                                  s.header.element_count());
  TableCache cache(s.header.precision, s.header.support_min,
                   s.header.support_max);
  LatentTensor latents =
      decode_symbols(s.payload, s.header.channels, s.header.height,
                     s.header.width, cache.supplier(side));
  StreamRate r;
  std::uint64_t per_channel =
      static_cast<std::uint64_t>(s.header.height) * s.header.width;
  auto supplier = cache.supplier(side);
  for (std::uint32_t c = 0; c < s.header.channels; ++c) {
    RateRow row;
    row.channel = c;
    row.symbols = per_channel;
    for (std::uint64_t i = 0; i < per_channel; ++i) {
      std::size_t idx = static_cast<std::size_t>(c * per_channel + i);
      row.table_bits += supplier(idx).ideal_bits(latents.values[idx]);
    }
    r.channels.push_back(row);
  }
  r.payload_bits = measure(s);
  r.param_bits = 8 * s.param_block.size();
  r.header_bits = 8 * 43;
  r.pixel_count = static_cast<std::uint64_t>(side.orig_width) *
                  side.orig_height;
  if (r.pixel_count == 0) {
    r.pixel_count = static_cast<std::uint64_t>(s.header.height) *
                    s.header.width;
  }
  r.bpp = r.pixel_count
              ? static_cast<double>(r.payload_bits) /
                    static_cast<double>(r.pixel_count)
              : 0.0;
  return r;
}

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(bytes));
  return std::string(buf);
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json cfg(nlohmann::ordered_json::object());
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  j["seed"] = seed;
  nlohmann::ordered_json inputs(nlohmann::ordered_json::object());
  for (const auto& [k, v] : input_hashes) inputs[k] = v;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["timing_ms"] = timing_ms;
  return j.dump(2) + "\n";
}

}  // namespace dicm
