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
// End-to-end checks against the built CLI binary; its path arrives in
// the DICM_CLI environment variable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dicm/format.hpp"
#include "dicm/pipeline.hpp"
#include "dicm/toy_codec.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace dicm;

namespace {

std::string cli_path() {
  const char* p = std::getenv("DICM_CLI");
  REQUIRE(p != nullptr);
  return std::string(p);
}

int run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("exit codes: usage, data, success") {
  CHECK(run("bogus-subcommand") == 2);
  CHECK(run("encode") == 2);
  CHECK(run("decode does_not_exist.dicm") == 3);
  CHECK(run("--help") == 0);
  CHECK(run("selftest") == 0);

  // A stream with a corrupted magic is a data error.
  fs::create_directories("cli_scratch");
  std::ofstream bad("cli_scratch/bad.dicm", std::ios::binary);
  bad << "XXXXnot a stream";
  bad.close();
  CHECK(run("decode cli_scratch/bad.dicm") == 3);
}

TEST_CASE("CLI round trip: latents exact, masked-in pixels within 4q") {
  fs::create_directories("cli_scratch");
  Image x = synthetic::latent_texture(64, 64, 77, 8, 12);
  MaskImage m = synthetic::left_mask(64, 64, 0.5);
  write_pgm(x, "cli_scratch/rt.pgm");
  write_mask_pgm(m, "cli_scratch/rt_mask.pgm");

  REQUIRE(run("encode cli_scratch/rt.pgm --mask cli_scratch/rt_mask.pgm "
              "--seed 3 --out cli_scratch/rt.dicm") == 0);
  REQUIRE(run("decode cli_scratch/rt.dicm --out cli_scratch/rt_out.pgm") == 0);

  // Latents in the stream decode exactly.
  Bitstream s = read_bitstream_file("cli_scratch/rt.dicm");
  LatentTensor first = decode_latents(s);
  LatentTensor second = decode_latents(s);
  CHECK(first.values == second.values);

  // Masked-in pixels reproduce within the 4q quantization bound.
  Image in = read_pgm("cli_scratch/rt.pgm");
  Image out = read_pgm("cli_scratch/rt_out.pgm");
  REQUIRE(out.width == in.width);
  REQUIRE(out.height == in.height);
  TransformSpec spec;
  double pgm_step = 1.0 / 255.0;
  double worst = 0.0;
  for (std::uint32_t yy = 0; yy < in.height; ++yy) {
    for (std::uint32_t xx = 0; xx < in.width; ++xx) {
      if (!m.at(xx, yy)) continue;
      worst = std::max(worst, std::fabs(in.at(xx, yy) - out.at(xx, yy)));
    }
  }
  CHECK(worst <= 4.0 * spec.q + 2.0 * pgm_step);

  // The rate report parses as CSV with a header plus one channel row.
  REQUIRE(run("rate cli_scratch/rt.dicm --out cli_scratch/rt.csv") == 0);
  std::ifstream csv("cli_scratch/rt.csv");
  std::string header, row;
  REQUIRE(std::getline(csv, header));
  REQUIRE(std::getline(csv, row));
  CHECK(header.find("payload_bits") != std::string::npos);
  CHECK(row.find("cli_scratch/rt.dicm") != std::string::npos);
}

TEST_CASE("missing mask degrades to an ordinary codec") {
  fs::create_directories("cli_scratch");
  Image x = synthetic::latent_texture(32, 32, 5, 6, 8);
  write_pgm(x, "cli_scratch/nomask.pgm");
  REQUIRE(run("encode cli_scratch/nomask.pgm --seed 1 "
              "--out cli_scratch/nomask.dicm") == 0);
  REQUIRE(run("decode cli_scratch/nomask.dicm "
              "--out cli_scratch/nomask_out.pgm") == 0);
  Image in = read_pgm("cli_scratch/nomask.pgm");
  Image out = read_pgm("cli_scratch/nomask_out.pgm");
  TransformSpec spec;
  double worst = 0.0;
  for (std::size_t i = 0; i < in.pixels.size(); ++i) {
    worst = std::max(worst, std::fabs(in.pixels[i] - out.pixels[i]));
  }
  CHECK(worst <= 4.0 * spec.q + 2.0 / 255.0);
}

TEST_CASE("gaussian-only demo runs twice to identical CSVs") {
  fs::create_directories("cli_scratch/gdemo_corpus");
  for (int k = 0; k < 2; ++k) {
    Image x = synthetic::latent_texture(32, 32, 40 + k, 6, 8);
    MaskImage m = synthetic::left_mask(32, 32, 0.5);
    std::string stem = "cli_scratch/gdemo_corpus/g" + std::to_string(k);
    write_pgm(x, stem + ".pgm");
    write_mask_pgm(m, stem + "_mask.pgm");
  }
  REQUIRE(run("demo cli_scratch/gdemo_corpus --gaussian-only --seed 9 "
              "--steps 120 --out cli_scratch/gdemo_out") == 0);
  fs::copy_file("cli_scratch/gdemo_out/demo.csv", "cli_scratch/gdemo_first.csv",
                fs::copy_options::overwrite_existing);
  REQUIRE(run("demo cli_scratch/gdemo_corpus --gaussian-only --seed 9 "
              "--steps 120 --out cli_scratch/gdemo_out") == 0);
  std::ifstream a("cli_scratch/gdemo_first.csv", std::ios::binary);
  std::ifstream b("cli_scratch/gdemo_out/demo.csv", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)),
                 std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)),
                 std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  // Both arms are Gaussian-only: identical bits columns.
  std::istringstream rows(sa);
  std::string line;
  std::getline(rows, line);  // header
  while (std::getline(rows, line)) {
    if (line.size() < 3) continue;
    std::vector<std::string> cols;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cols.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    cols.push_back(cur);
    REQUIRE(cols.size() >= 6);
    CHECK(cols[4] == cols[5]);  // bits_mixture == bits_gaussian
  }
}

TEST_CASE("soft and gaussian-only streams decode") {
  fs::create_directories("cli_scratch");
  Image x = synthetic::latent_texture(32, 32, 8, 6, 8);
  MaskImage m = synthetic::left_mask(32, 32, 0.5);
  write_pgm(x, "cli_scratch/v.pgm");
  write_mask_pgm(m, "cli_scratch/v_mask.pgm");
  for (const char* extra : {" --soft", " --gaussian-only"}) {
    REQUIRE(run(std::string("encode cli_scratch/v.pgm --mask "
                            "cli_scratch/v_mask.pgm --seed 2 --out "
                            "cli_scratch/v.dicm") +
                extra) == 0);
    REQUIRE(run("decode cli_scratch/v.dicm --out cli_scratch/v_out.pgm") == 0);
  }
}
