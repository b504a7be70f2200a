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

#include "dicm/toy_codec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "dicm/errors.hpp"
#include "dicm/math.hpp"

namespace dicm {
namespace {

constexpr std::uint32_t kB = TransformSpec::kBlock;

// Orthonormal type-II cosine basis: row k, column n.
struct Basis {
  double b[kB][kB];
  Basis() {
    const double pi = 3.14159265358979323846;
    for (std::uint32_t k = 0; k < kB; ++k) {
      double a = k == 0 ? std::sqrt(1.0 / kB) : std::sqrt(2.0 / kB);
      for (std::uint32_t n = 0; n < kB; ++n) {
        b[k][n] = a * std::cos(pi * (2.0 * n + 1.0) * k / (2.0 * kB));
      }
    }
  }
};

const Basis& basis() {
  static const Basis kBasis;
  return kBasis;
}

std::uint32_t pad_up(std::uint32_t n) { return (n + kB - 1) / kB * kB; }

void require_padded(std::uint32_t w, std::uint32_t h) {
  if (w == 0 || h == 0 || w % kB != 0 || h % kB != 0) {
    throw Error(ErrorKind::kDimensionMismatch,
                "plane dimensions must be nonzero multiples of 8");
  }
}

// C = B X B^T for one block (forward); X = B^T C B (inverse).
void block_forward(const double* src, std::size_t stride, double* dst,
                   std::size_t dstride) {
  const auto& B = basis().b;
  double tmp[kB][kB];
  for (std::uint32_t u = 0; u < kB; ++u) {
    for (std::uint32_t n = 0; n < kB; ++n) {
      double acc = 0.0;
      for (std::uint32_t m = 0; m < kB; ++m) {
        acc += B[u][m] * src[m * stride + n];
      }
      tmp[u][n] = acc;
    }
  }
  for (std::uint32_t u = 0; u < kB; ++u) {
    for (std::uint32_t v = 0; v < kB; ++v) {
      double acc = 0.0;
      for (std::uint32_t n = 0; n < kB; ++n) {
        acc += tmp[u][n] * B[v][n];
      }
      dst[u * dstride + v] = acc;
    }
  }
}

void block_inverse(const double* src, std::size_t stride, double* dst,
                   std::size_t dstride) {
  const auto& B = basis().b;
  double tmp[kB][kB];
  for (std::uint32_t m = 0; m < kB; ++m) {
    for (std::uint32_t v = 0; v < kB; ++v) {
      double acc = 0.0;
      for (std::uint32_t u = 0; u < kB; ++u) {
        acc += B[u][m] * src[u * stride + v];
      }
      tmp[m][v] = acc;
    }
  }
  for (std::uint32_t m = 0; m < kB; ++m) {
    for (std::uint32_t n = 0; n < kB; ++n) {
      double acc = 0.0;
      for (std::uint32_t v = 0; v < kB; ++v) {
        acc += tmp[m][v] * B[v][n];
      }
      dst[m * dstride + n] = acc;
    }
  }
}

}  // namespace

Image pad_to_blocks(const Image& x) {
  if (x.width == 0 || x.height == 0) {
    throw Error(ErrorKind::kDimensionMismatch, "empty image");
  }
  Image p;
  p.width = pad_up(x.width);
  p.height = pad_up(x.height);
  p.pixels.resize(static_cast<std::size_t>(p.width) * p.height);
  for (std::uint32_t y = 0; y < p.height; ++y) {
    std::uint32_t sy = std::min(y, x.height - 1);
    for (std::uint32_t xx = 0; xx < p.width; ++xx) {
      std::uint32_t sx = std::min(xx, x.width - 1);
      p.at(xx, y) = x.at(sx, sy);
    }
  }
  return p;
}

MaskImage pad_to_blocks(const MaskImage& m) {
  if (m.width == 0 || m.height == 0) {
    throw Error(ErrorKind::kDimensionMismatch, "empty mask");
  }
  MaskImage p;
  p.width = pad_up(m.width);
  p.height = pad_up(m.height);
  p.values.resize(static_cast<std::size_t>(p.width) * p.height);
  for (std::uint32_t y = 0; y < p.height; ++y) {
    std::uint32_t sy = std::min(y, m.height - 1);
    for (std::uint32_t xx = 0; xx < p.width; ++xx) {
      std::uint32_t sx = std::min(xx, m.width - 1);
      p.values[static_cast<std::size_t>(y) * p.width + xx] = m.at(sx, sy);
    }
  }
  return p;
}

CoeffGrid forward_blocks(const Image& padded) {
  require_padded(padded.width, padded.height);
  CoeffGrid c;
  c.width = padded.width;
  c.height = padded.height;
  c.v.resize(padded.pixels.size());
  for (std::uint32_t by = 0; by < padded.height; by += kB) {
    for (std::uint32_t bx = 0; bx < padded.width; bx += kB) {
      std::size_t off = static_cast<std::size_t>(by) * padded.width + bx;
      block_forward(padded.pixels.data() + off, padded.width,
                    c.v.data() + off, c.width);
    }
  }
  return c;
}

Image inverse_blocks(const CoeffGrid& coeffs) {
  require_padded(coeffs.width, coeffs.height);
  Image p;
  p.width = coeffs.width;
  p.height = coeffs.height;
  p.pixels.resize(coeffs.v.size());
  for (std::uint32_t by = 0; by < coeffs.height; by += kB) {
    for (std::uint32_t bx = 0; bx < coeffs.width; bx += kB) {
      std::size_t off = static_cast<std::size_t>(by) * coeffs.width + bx;
      block_inverse(coeffs.v.data() + off, coeffs.width,
                    p.pixels.data() + off, p.width);
    }
  }
  return p;
}

CoeffGrid analyze(const Image& x, const TransformSpec& spec) {
  if (!(spec.q > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter, "quantization step must be > 0");
  }
  CoeffGrid c = forward_blocks(pad_to_blocks(x));
  for (double& v : c.v) v /= spec.q;
  return c;
}

LatentTensor quantize(const CoeffGrid& coeffs) {
  LatentTensor t;
  t.channels = 1;
  t.height = coeffs.height;
  t.width = coeffs.width;
  t.values.resize(coeffs.v.size());
  for (std::size_t i = 0; i < coeffs.v.size(); ++i) {
    t.values[i] = static_cast<std::int32_t>(round_half_away(coeffs.v[i]));
  }
  return t;
}

Image synthesize(const CoeffGrid& coeffs, const TransformSpec& spec,
                 std::uint32_t orig_width, std::uint32_t orig_height) {
  if (!(spec.q > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter, "quantization step must be > 0");
  }
  if (orig_width > coeffs.width || orig_height > coeffs.height) {
    throw Error(ErrorKind::kDimensionMismatch,
                "crop dimensions exceed the coefficient grid");
  }
  CoeffGrid scaled = coeffs;
  for (double& v : scaled.v) v *= spec.q;
  Image full = inverse_blocks(scaled);
  Image out;
  out.width = orig_width;
  out.height = orig_height;
  out.pixels.resize(static_cast<std::size_t>(orig_width) * orig_height);
  for (std::uint32_t y = 0; y < orig_height; ++y) {
    for (std::uint32_t x = 0; x < orig_width; ++x) {
      double v = full.at(x, y);
      out.at(x, y) = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
  }
  return out;
}

Image synthesize(const LatentTensor& latents, const TransformSpec& spec,
                 std::uint32_t orig_width, std::uint32_t orig_height) {
  if (latents.channels != 1) {
    throw Error(ErrorKind::kDimensionMismatch,
                "synthesize expects a single-channel latent tensor");
  }
  CoeffGrid c;
  c.width = latents.width;
  c.height = latents.height;
  c.v.resize(latents.values.size());
  for (std::size_t i = 0; i < c.v.size(); ++i) {
    c.v[i] = static_cast<double>(latents.values[i]);
  }
  return synthesize(c, spec, orig_width, orig_height);
}

std::vector<std::uint8_t> mask_to_latent_mask(const MaskImage& m) {
  MaskImage p = pad_to_blocks(m);
  std::vector<std::uint8_t> w(static_cast<std::size_t>(p.width) * p.height, 0);
  for (std::uint32_t by = 0; by < p.height; by += kB) {
    for (std::uint32_t bx = 0; bx < p.width; bx += kB) {
      std::uint8_t in = 0;
      for (std::uint32_t dy = 0; dy < kB && !in; ++dy) {
        for (std::uint32_t dx = 0; dx < kB; ++dx) {
          if (p.at(bx + dx, by + dy)) {
            in = 1;
            break;
          }
        }
      }
      if (in) {
        for (std::uint32_t dy = 0; dy < kB; ++dy) {
          for (std::uint32_t dx = 0; dx < kB; ++dx) {
            w[static_cast<std::size_t>(by + dy) * p.width + (bx + dx)] = 1;
          }
        }
      }
    }
  }
  return w;
}

MaskImage all_ones_mask(std::uint32_t width, std::uint32_t height) {
  MaskImage m;
  m.width = width;
  m.height = height;
  m.values.assign(static_cast<std::size_t>(width) * height, 1);
  return m;
}

namespace {

// Reads PGM header tokens, skipping whitespace and '#' comments.
long pgm_token(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) {
    throw Error(ErrorKind::kDecode, "malformed PGM header");
  }
  long v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    c = in.get();
  }
  return v;
}

std::vector<std::uint8_t> read_pgm_bytes(const std::string& path,
                                         std::uint32_t* w, std::uint32_t* h) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path);
  char m0 = 0, m1 = 0;
  f.get(m0);
  f.get(m1);
  if (m0 != 'P' || m1 != '5') {
    throw Error(ErrorKind::kDecode, path + ": not a binary PGM (P5)");
  }
  long width = pgm_token(f);
  long height = pgm_token(f);
  long maxval = pgm_token(f);
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kDecode, path + ": bad PGM dimensions");
  }
  if (maxval != 255) {
    throw Error(ErrorKind::kDecode, path + ": PGM maxval must be 255");
  }
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * height);
  f.read(reinterpret_cast<char*>(bytes.data()),
         static_cast<std::streamsize>(bytes.size()));
  if (f.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(ErrorKind::kDecode, path + ": truncated PGM payload");
  }
  *w = static_cast<std::uint32_t>(width);
  *h = static_cast<std::uint32_t>(height);
  return bytes;
}

}  // namespace

Image read_pgm(const std::string& path) {
  Image img;
  auto bytes = read_pgm_bytes(path, &img.width, &img.height);
  img.pixels.resize(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    img.pixels[i] = bytes[i] / 255.0;
  }
  return img;
}

void write_pgm(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> bytes(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double v = img.pixels[i];
    v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kIo, "short write to " + path);
}

MaskImage read_mask_pgm(const std::string& path) {
  MaskImage m;
  auto bytes = read_pgm_bytes(path, &m.width, &m.height);
  m.values.resize(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    m.values[i] = bytes[i] >= 128 ? 1 : 0;
  }
  return m;
}

void write_mask_pgm(const MaskImage& m, const std::string& path) {
  Image img;
  img.width = m.width;
  img.height = m.height;
  img.pixels.resize(m.values.size());
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    img.pixels[i] = m.values[i] ? 1.0 : 0.0;
  }
  write_pgm(img, path);
}

}  // namespace dicm
