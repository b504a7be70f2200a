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

#ifndef DICM_PIPELINE_HPP_
#define DICM_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dicm/format.hpp"
#include "dicm/optimizer.hpp"

namespace dicm {

struct EncodeOptions {
  bool gaussian_only = false;  // baseline arm instead of the mixture
  bool soft = false;           // code the true mixture PMF per element
  int precision = kDefaultPrecision;
  std::int32_t support = kDefaultSupport;  // symbols span [-support, support]
};

struct EncodeArtifacts {
  Bitstream stream;
  OptimResult optim;
  LatentTensor committed;
  SideInfo side;
};

// Fits entropy parameters against the masked objective, hardens, commits
// symbols, and codes them into a self-contained stream.
EncodeArtifacts encode_image(const Image& x, const MaskImage& m,
                             const TransformSpec& spec, const OptimConfig& cfg,
                             const EncodeOptions& opts);

LatentTensor decode_latents(const Bitstream& s);
Image decode_image(const Bitstream& s);

// Per-channel ideal table bits of the symbols a stream carries.
struct RateRow {
  std::uint32_t channel = 0;
  std::uint64_t symbols = 0;
  double table_bits = 0.0;
};
struct StreamRate {
  std::vector<RateRow> channels;
  std::uint64_t payload_bits = 0;
  std::uint64_t param_bits = 0;
  std::uint64_t header_bits = 0;
  std::uint64_t pixel_count = 0;
  double bpp = 0.0;  // payload bits / original pixel count
};
StreamRate stream_rate(const Bitstream& s);

// Deterministic run manifest. timing_ms is execution metadata; all other
// fields reproduce byte-identically across re-runs with equal inputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_hashes;  // path -> fnv1a-64 hex
  std::vector<std::string> outputs;
  double timing_ms = 0.0;

  std::string to_json() const;
};

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes);
std::string file_hash_hex(const std::string& path);

}  // namespace dicm

#endif  // DICM_PIPELINE_HPP_
