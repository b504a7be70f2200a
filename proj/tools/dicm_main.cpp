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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "dicm/coder.hpp"
#include "dicm/errors.hpp"
#include "dicm/format.hpp"
#include "dicm/optimizer.hpp"
#include "dicm/pipeline.hpp"
#include "dicm/rate_loss.hpp"
#include "dicm/toy_codec.hpp"

namespace fs = std::filesystem;
using namespace dicm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct CommonFlags {
  double lambda = 10.0;
  int steps = 500;
  double step_size = 0.05;
  std::uint64_t seed = 0;
  double q = 1.0 / 32.0;
  int precision = 16;
  std::int32_t support = 255;
  bool gaussian_only = false;
  bool soft = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--lambda", f->lambda, "rate/distortion trade-off constant")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--steps", f->steps, "gradient descent steps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--step-size", f->step_size, "gradient descent step size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f->seed, "run seed recorded in the manifest");
  cmd->add_option("--q", f->q, "transform quantization step")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--precision", f->precision, "table precision bits [8,24]")
      ->check(CLI::Range(8, 24));
  cmd->add_option("--support", f->support,
                  "symbol support bound S; symbols span [-S, S]")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--gaussian-only", f->gaussian_only,
                "freeze w at 1 (Gaussian-only entropy model)");
  cmd->add_flag("--soft", f->soft,
                "code the true per-element mixture PMF instead of the "
                "hardened delta/Gaussian choice");
}

OptimConfig to_optim_config(const CommonFlags& f) {
  OptimConfig cfg;
  cfg.lambda = f.lambda;
  cfg.steps = f.steps;
  cfg.step_size = f.step_size;
  cfg.seed = f.seed;
  return cfg;
}

EncodeOptions to_encode_options(const CommonFlags& f) {
  EncodeOptions o;
  o.gaussian_only = f.gaussian_only;
  o.soft = f.soft;
  o.precision = f.precision;
  o.support = f.support;
  return o;
}

std::map<std::string, std::string> config_echo(const CommonFlags& f) {
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  return {{"lambda", fmt(f.lambda)},
          {"steps", std::to_string(f.steps)},
          {"step_size", fmt(f.step_size)},
          {"q", fmt(f.q)},
          {"precision", std::to_string(f.precision)},
          {"support", std::to_string(f.support)},
          {"gaussian_only", f.gaussian_only ? "true" : "false"},
          {"soft", f.soft ? "true" : "false"}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  f << text;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::string(buf);
}

MaskImage load_or_default_mask(const std::string& mask_path, const Image& x) {
  if (mask_path.empty()) {
    // No mask means the whole image matters; the tool degrades to an
    // ordinary codec.
    return all_ones_mask(x.width, x.height);
  }
  return read_mask_pgm(mask_path);
}

// Hardened per-block weight map, upsampled 8x and cropped: 0 = delta
// (black), 255 = Gaussian (white).
Image hardened_map_image(const OptimResult& r) {
  std::uint32_t bw = r.coefficients.width / 8;
  std::uint32_t bh = r.coefficients.height / 8;
  Image up;
  up.width = r.orig_width;
  up.height = r.orig_height;
  up.pixels.resize(static_cast<std::size_t>(up.width) * up.height);
  for (std::uint32_t y = 0; y < up.height; ++y) {
    for (std::uint32_t x = 0; x < up.width; ++x) {
      std::uint32_t bx = std::min(x / 8, bw - 1);
      std::uint32_t by = std::min(y / 8, bh - 1);
      double acc = 0.0;
      for (std::uint32_t dy = 0; dy < 8; ++dy) {
        for (std::uint32_t dx = 0; dx < 8; ++dx) {
          std::size_t idx =
              static_cast<std::size_t>(by * 8 + dy) * r.coefficients.width +
              bx * 8 + dx;
          acc += r.hardened[idx];
        }
      }
      up.at(x, y) = acc / 64.0;
    }
  }
  return up;
}

int cmd_encode(const std::string& image_path, const std::string& mask_path,
               const CommonFlags& flags, std::string out_path) {
  auto t0 = std::chrono::steady_clock::now();
  Image x = read_pgm(image_path);
  MaskImage m = load_or_default_mask(mask_path, x);
  TransformSpec spec;
  spec.q = flags.q;
  EncodeArtifacts art = encode_image(x, m, spec, to_optim_config(flags),
                                     to_encode_options(flags));
  if (out_path.empty()) {
    out_path = fs::path(image_path).replace_extension(".dicm").string();
  }
  write_bitstream_file(art.stream, out_path);

  RunManifest man;
  man.command = "encode";
  man.config = config_echo(flags);
  man.seed = flags.seed;
  man.input_hashes[image_path] = file_hash_hex(image_path);
  if (!mask_path.empty()) man.input_hashes[mask_path] = file_hash_hex(mask_path);
  man.outputs.push_back(out_path);
  man.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  write_text_file(out_path + ".manifest.json", man.to_json());

  std::printf("wrote %s (payload %llu bits, side info %zu bytes)\n",
              out_path.c_str(),
              static_cast<unsigned long long>(measure(art.stream)),
              art.stream.param_block.size());
  return kExitOk;
}

int cmd_decode(const std::string& stream_path, const CommonFlags& flags,
               std::string out_path) {
  auto t0 = std::chrono::steady_clock::now();
  Bitstream s = read_bitstream_file(stream_path);
  Image img = decode_image(s);
  if (out_path.empty()) {
    out_path = fs::path(stream_path).replace_extension(".out.pgm").string();
  }
  write_pgm(img, out_path);

  RunManifest man;
  man.command = "decode";
  man.seed = flags.seed;
  man.input_hashes[stream_path] = file_hash_hex(stream_path);
  man.outputs.push_back(out_path);
  man.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  write_text_file(out_path + ".manifest.json", man.to_json());

  std::printf("wrote %s (%ux%u)\n", out_path.c_str(), img.width, img.height);
  return kExitOk;
}

int cmd_rate(const std::string& stream_path, const std::string& out_path) {
  Bitstream s = read_bitstream_file(stream_path);
  StreamRate r = stream_rate(s);
  std::string csv =
      "stream,channel,symbols,table_ideal_bits,payload_bits,param_bits,"
      "header_bits,total_bits,bpp\r\n";
  std::uint64_t total =
      r.payload_bits + r.param_bits + r.header_bits;
  for (const auto& row : r.channels) {
    csv += stream_path + "," + std::to_string(row.channel) + "," +
           std::to_string(row.symbols) + "," + format_double(row.table_bits) +
           "," + std::to_string(r.payload_bits) + "," +
           std::to_string(r.param_bits) + "," +
           std::to_string(r.header_bits) + "," + std::to_string(total) + "," +
           format_double(r.bpp) + "\r\n";
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_text_file(out_path, csv);
  }
  return kExitOk;
}

struct DemoRow {
  std::string csv;
};

unsigned thread_budget(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("DICM_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
  }
  return static_cast<unsigned>(std::min<std::size_t>(hw, jobs ? jobs : 1));
}

int cmd_demo(const std::string& corpus_dir, const CommonFlags& flags,
             std::string out_dir) {
  auto t0 = std::chrono::steady_clock::now();
  if (out_dir.empty()) out_dir = "demo_out";
  fs::create_directories(out_dir);

  std::vector<std::string> images;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".pgm") continue;
    if (name.size() > 9 && name.substr(name.size() - 9) == "_mask.pgm") continue;
    if (name.size() > 9 && name.substr(name.size() - 9) == "_wmap.pgm") continue;
    images.push_back(entry.path().string());
  }
  std::sort(images.begin(), images.end());
  if (images.empty()) {
    throw Error(ErrorKind::kIo, "no .pgm images found in " + corpus_dir);
  }

  TransformSpec spec;
  spec.q = flags.q;
  OptimConfig cfg = to_optim_config(flags);

  std::vector<DemoRow> rows(images.size());
  std::vector<std::string> wmap_paths(images.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= images.size()) return;
      {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error) return;
      }
      try {
      const std::string& img_path = images[i];
      Image x = read_pgm(img_path);
      std::string stem = fs::path(img_path).stem().string();
      std::string mask_path =
          (fs::path(corpus_dir) / (stem + "_mask.pgm")).string();
      MaskImage m = fs::exists(mask_path) ? read_mask_pgm(mask_path)
                                          : all_ones_mask(x.width, x.height);

      EncodeOptions mix_opts = to_encode_options(flags);
      EncodeOptions gau_opts = mix_opts;
      gau_opts.gaussian_only = true;
      gau_opts.soft = false;
      EncodeArtifacts mix = encode_image(x, m, spec, cfg, mix_opts);
      EncodeArtifacts gau = encode_image(x, m, spec, cfg, gau_opts);

      Image rec_mix = decode_image(mix.stream);
      Image rec_gau = decode_image(gau.stream);
      double mse_mix = masked_mse(x, rec_mix, m);
      double mse_gau = masked_mse(x, rec_gau, m);
      double bits_mix = static_cast<double>(measure(mix.stream));
      double bits_gau = static_cast<double>(measure(gau.stream));
      double flag_bits =
          mix.stream.header.model == StreamModel::kHardened
              ? static_cast<double>(mix.optim.params.size())
              : 0.0;
      std::uint64_t out_px = 0;
      for (auto v : m.values) out_px += v == 0 ? 1 : 0;
      double out_frac = m.values.empty()
                            ? 0.0
                            : static_cast<double>(out_px) /
                                  static_cast<double>(m.values.size());
      double savings =
          bits_gau > 0.0 ? 100.0 * (bits_gau - bits_mix) / bits_gau : 0.0;

      std::string wmap = (fs::path(out_dir) / (stem + "_wmap.pgm")).string();
      write_pgm(hardened_map_image(mix.optim), wmap);
      wmap_paths[i] = wmap;

      rows[i].csv = stem + "," + std::to_string(x.width) + "," +
                    std::to_string(x.height) + "," + format_double(out_frac) +
                    "," + format_double(bits_mix) + "," +
                    format_double(bits_gau) + "," + format_double(mse_mix) +
                    "," + format_double(mse_gau) + "," +
                    format_double(flag_bits) + "," +
                    std::to_string(8 * mix.stream.param_block.size()) + "," +
                    std::to_string(8 * gau.stream.param_block.size()) + "," +
                    format_double(savings) + "," + wmap + "\r\n";
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  unsigned nthreads = thread_budget(images.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::string csv =
      "image,width,height,masked_out_fraction,bits_mixture,bits_gaussian,"
      "masked_mse_mixture,masked_mse_gaussian,flag_bits,param_bits_mixture,"
      "param_bits_gaussian,savings_pct,weightmap\r\n";
  for (const auto& row : rows) csv += row.csv;
  std::string csv_path = (fs::path(out_dir) / "demo.csv").string();
  write_text_file(csv_path, csv);

  RunManifest man;
  man.command = "demo";
  man.config = config_echo(flags);
  man.seed = flags.seed;
  for (const auto& p : images) man.input_hashes[p] = file_hash_hex(p);
  man.outputs.push_back(csv_path);
  for (const auto& p : wmap_paths) man.outputs.push_back(p);
  man.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  write_text_file((fs::path(out_dir) / "demo.manifest.json").string(),
                  man.to_json());

  std::printf("wrote %s (%zu images)\n", csv_path.c_str(), images.size());
  return kExitOk;
}

bool check(bool ok, const char* what, int* failures) {
  std::printf("%s %s\n", ok ? "PASS" : "FAIL", what);
  if (!ok) ++*failures;
  return ok;
}

int cmd_selftest() {
  int failures = 0;
  std::mt19937_64 rng(12345);

  {
    bool ok = true;
    for (int i = 0; i <= 2000; ++i) {
      double x = -10.0 + i * 0.01;
      if (std::fabs(erfc_cody(x) - std::erfc(x)) > 1e-12) ok = false;
    }
    check(ok, "erfc approximation within 1e-12 of libm", &failures);
  }
  {
    bool ok = true;
    std::uniform_real_distribution<double> mu_d(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
      double mu = mu_d(rng);
      int hits = 0;
      std::int32_t lo = static_cast<std::int32_t>(std::floor(mu)) - 2;
      for (std::int32_t y = lo; y <= lo + 4; ++y) {
        hits += delta_likelihood(y, DeltaParams{mu}) == 1.0 ? 1 : 0;
      }
      if (hits != 1) ok = false;
    }
    ok = ok && delta_likelihood(3, DeltaParams{3.5}) == 1.0 &&
         delta_likelihood(4, DeltaParams{3.5}) == 0.0;
    check(ok, "delta uniqueness and boundary convention", &failures);
  }
  {
    bool ok = true;
    std::uniform_real_distribution<double> mu_d(-8.0, 8.0);
    std::uniform_real_distribution<double> sig_d(kSigmaMin, 10.0);
    for (int i = 0; i < 200; ++i) {
      GaussianParams p{mu_d(rng), sig_d(rng)};
      std::int32_t lo = static_cast<std::int32_t>(std::floor(p.mu - 40 * p.sigma)) - 2;
      std::int32_t hi = static_cast<std::int32_t>(std::ceil(p.mu + 40 * p.sigma)) + 2;
      double sum = 0.0;
      for (std::int32_t y = lo; y <= hi; ++y) sum += gaussian_likelihood(y, p);
      if (std::fabs(sum - 1.0) > 1e-6) ok = false;
    }
    check(ok, "Gaussian likelihood normalizes over +-40 sigma", &failures);
  }
  {
    bool ok = true;
    std::uniform_int_distribution<std::int32_t> sym_d(-40, 40);
    std::uniform_real_distribution<double> mu_d(-30.0, 30.0);
    std::uniform_real_distribution<double> sig_d(kSigmaMin, 20.0);
    for (int trial = 0; trial < 50 && ok; ++trial) {
      LatentTensor t;
      t.channels = 1;
      t.height = 1;
      t.width = 256;
      for (std::uint32_t i = 0; i < 256; ++i) t.values.push_back(sym_d(rng));
      PmfTable table = build_pmf(GaussianParams{mu_d(rng), sig_d(rng)}, -40,
                                 40, 16);
      auto supplier = [&table](std::size_t) -> const PmfTable& { return table; };
      auto payload = encode_symbols(t, supplier);
      LatentTensor back = decode_symbols(payload, 1, 1, 256, supplier);
      if (back.values != t.values) ok = false;
      double ideal = ideal_bits(t, supplier);
      double bits = 8.0 * static_cast<double>(payload.size());
      if (bits < ideal - 1.0 || bits > ideal + 32.0) ok = false;
    }
    check(ok, "coder round-trip within the optimality band", &failures);
  }
  {
    Image x;
    x.width = 16;
    x.height = 16;
    std::uniform_real_distribution<double> px(0.05, 0.95);
    x.pixels.resize(256);
    for (auto& p : x.pixels) p = px(rng);
    CoeffGrid c = forward_blocks(x);
    Image back = inverse_blocks(c);
    double err = 0.0;
    double energy_pix = 0.0, energy_coef = 0.0;
    for (std::size_t i = 0; i < x.pixels.size(); ++i) {
      err = std::max(err, std::fabs(back.pixels[i] - x.pixels[i]));
      energy_pix += x.pixels[i] * x.pixels[i];
      energy_coef += c.v[i] * c.v[i];
    }
    check(err < 1e-9 && std::fabs(energy_pix - energy_coef) < 1e-8,
          "block transform reconstructs and preserves energy", &failures);
  }

  std::printf(failures == 0 ? "selftest OK\n" : "selftest FAILED\n");
  return failures == 0 ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dicm: block-transform image codec with per-element Gaussian/delta "
      "mixture entropy models and a lossless range coder"};
  app.require_subcommand(1);

  CommonFlags enc_flags, dec_flags, demo_flags;
  std::string enc_image, enc_mask, enc_out;
  auto* enc = app.add_subcommand(
      "encode", "optimize entropy parameters for a PGM image and code it");
  enc->add_option("image", enc_image, "input image (binary PGM, P5)")
      ->required();
  enc->add_option("--mask", enc_mask,
                  "binary mask PGM; pixels >= 128 must decode faithfully. "
                  "Missing mask means the whole image matters");
  enc->add_option("--out", enc_out, "output .dicm path");
  add_common_flags(enc, &enc_flags);

  std::string dec_stream, dec_out;
  auto* dec = app.add_subcommand("decode", "decode a .dicm stream to PGM");
  dec->add_option("stream", dec_stream, "input .dicm stream")->required();
  dec->add_option("--out", dec_out, "output PGM path");

  std::string rate_stream, rate_out;
  auto* rate = app.add_subcommand(
      "rate", "report coded size and bpp of a stream as CSV");
  rate->add_option("stream", rate_stream, "input .dicm stream")->required();
  rate->add_option("--out", rate_out, "CSV output path (default stdout)");

  std::string demo_dir, demo_out;
  auto* demo = app.add_subcommand(
      "demo",
      "run the mixture arm against the Gaussian-only arm over a corpus "
      "directory of PGM images (mask: <stem>_mask.pgm). Writes demo.csv "
      "with columns image,width,height,masked_out_fraction,bits_mixture,"
      "bits_gaussian,masked_mse_mixture,masked_mse_gaussian,flag_bits,"
      "param_bits_mixture,param_bits_gaussian,savings_pct,weightmap, plus "
      "one weight-map PGM per image (0 = delta, 255 = Gaussian). "
      "DICM_THREADS caps per-image parallelism");
  demo->add_option("corpus", demo_dir, "corpus directory")->required();
  demo->add_option("--out", demo_out, "output directory (default demo_out)");
  add_common_flags(demo, &demo_flags);

  auto* selftest =
      app.add_subcommand("selftest", "run the built-in invariant checks");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (enc->parsed()) return cmd_encode(enc_image, enc_mask, enc_flags, enc_out);
    if (dec->parsed()) return cmd_decode(dec_stream, dec_flags, dec_out);
    if (rate->parsed()) return cmd_rate(rate_stream, rate_out);
    if (demo->parsed()) return cmd_demo(demo_dir, demo_flags, demo_out);
    if (selftest->parsed()) return cmd_selftest();
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == ErrorKind::kInternal ? kExitInternal : kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
