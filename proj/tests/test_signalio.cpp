// tests/test_signalio.cpp

// Copyright 2026  maskbench authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "maskbench/features.hpp"
#include "maskbench/rng.hpp"
#include "maskbench/wav.hpp"
#include "oracles.hpp"

using namespace maskbench;
using namespace maskbench::signalio;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Waveform sine(double freq, double seconds, int rate = 16000,
              double amp = 0.5) {
  Waveform w;
  w.rate = rate;
  const long n = std::lround(seconds * rate);
  w.samples.resize(n);
  for (long i = 0; i < n; ++i) {
    w.samples[i] = amp * std::sin(2.0 * M_PI * freq * i / rate);
  }
  return w;
}

// Minimal PCM16 RIFF with arbitrary fmt fields, for parser edge cases.
std::string raw_wav_bytes(uint16_t fmt, uint16_t channels, uint32_t rate,
                          uint16_t bits, const std::vector<int16_t>& data) {
  std::string out;
  auto u32 = [&](uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
  };
  const uint32_t dlen = uint32_t(data.size() * 2);
  out.append("RIFF");
  u32(36 + dlen);
  out.append("WAVE");
  out.append("fmt ");
  u32(16);
  u16(fmt);
  u16(channels);
  u32(rate);
  u32(rate * 2 * channels);
  u16(uint16_t(2 * channels));
  u16(bits);
  out.append("data");
  u32(dlen);
  for (int16_t s : data) u16(uint16_t(s));
  return out;
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(bytes.data(), std::streamsize(bytes.size()));
}

}  // namespace

TEST_CASE("read_wav scales PCM16 by 1/32768") {
  const std::string path = temp_path("mb_scale.wav");
  write_bytes(path, raw_wav_bytes(1, 1, 16000, 16, {0, 16384, -32768}));
  Waveform w = read_wav(path);
  REQUIRE(w.rate == 16000);
  REQUIRE(w.samples.size() == 3);
  CHECK(w.samples[0] == 0.0);
  CHECK(w.samples[1] == 0.5);
  CHECK(w.samples[2] == -1.0);
}

TEST_CASE("read_wav accepts an empty data chunk") {
  const std::string path = temp_path("mb_empty.wav");
  write_bytes(path, raw_wav_bytes(1, 1, 16000, 16, {}));
  Waveform w = read_wav(path);
  CHECK(w.samples.empty());
}

TEST_CASE("read_wav rejects what it cannot represent") {
  const std::string path = temp_path("mb_bad.wav");
  write_bytes(path, raw_wav_bytes(1, 2, 16000, 16, {0, 0}));
  CHECK_THROWS_AS(read_wav(path), UnsupportedFormatError);
  write_bytes(path, raw_wav_bytes(3, 1, 16000, 32, {0}));
  CHECK_THROWS_AS(read_wav(path), UnsupportedFormatError);
  write_bytes(path, "RIFX___nonsense___");
  CHECK_THROWS_AS(read_wav(path), FormatError);
  std::string truncated = raw_wav_bytes(1, 1, 16000, 16, {1, 2, 3, 4});
  truncated.resize(truncated.size() - 3);
  write_bytes(path, truncated);
  CHECK_THROWS_AS(read_wav(path), FormatError);
}

TEST_CASE("write_wav quantizes with clamping") {
  const std::string path = temp_path("mb_clamp.wav");
  Waveform w;
  w.rate = 16000;
  w.samples = {1.0, 0.0, -1.0};
  write_wav(w, path);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 44 + 6);
  auto sample_at = [&](int i) {
    return int16_t(uint8_t(bytes[44 + 2 * i]) |
                   (uint8_t(bytes[45 + 2 * i]) << 8));
  };
  CHECK(sample_at(0) == 32767);  // clamped from 32768
  CHECK(sample_at(1) == 0);
  CHECK(sample_at(2) == -32768);
}

TEST_CASE("wav round trip error is within one quantization step") {
  const std::string path = temp_path("mb_roundtrip.wav");
  SECTION("440 Hz tone") {
    Waveform w = sine(440.0, 1.0);
    write_wav(w, path);
    Waveform r = read_wav(path);
    REQUIRE(r.samples.size() == w.samples.size());
    for (size_t i = 0; i < w.samples.size(); ++i) {
      CHECK(std::abs(r.samples[i] - w.samples[i]) <= 1.0 / 32768.0);
    }
  }
  SECTION("random waveform") {
    Rng rng(7);
    Waveform w;
    w.rate = 16000;
    w.samples.resize(2000);
    for (double& s : w.samples) s = rng.uniform(-1.0, 1.0);
    write_wav(w, path);
    Waveform r = read_wav(path);
    REQUIRE(r.samples.size() == w.samples.size());
    for (size_t i = 0; i < w.samples.size(); ++i) {
      CHECK(std::abs(r.samples[i] - w.samples[i]) <= 1.0 / 32768.0);
    }
  }
}

TEST_CASE("frame_count formula") {
  CHECK(frame_count(16000, 16000, 0.025, 0.010) == 98);
  CHECK(frame_count(399, 16000, 0.025, 0.010) == 0);
  CHECK(frame_count(400, 16000, 0.025, 0.010) == 1);
  CHECK(frame_count(0, 16000, 0.025, 0.010) == 0);
}

TEST_CASE("frame_count is monotone and steps by one per hop") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const long n = long(rng.uniform_int(20000));
    const long c0 = frame_count(n, 16000, 0.025, 0.010);
    const long c1 = frame_count(n + 1, 16000, 0.025, 0.010);
    CHECK(c1 >= c0);
    if (n >= 400) {
      CHECK(frame_count(n + 160, 16000, 0.025, 0.010) == c0 + 1);
    }
  }
  // One hop past the first full window adds exactly one frame.
  CHECK(frame_count(400 + 160, 16000, 0.025, 0.010) == 2);
}

TEST_CASE("logmel of silence is the floored log") {
  Waveform w;
  w.rate = 16000;
  w.samples.assign(16000, 0.0);
  FeatureMatrix fm = logmel_features(w);
  REQUIRE(fm.rows() == 98);
  REQUIRE(fm.cols() == 40);
  const double floor_log = std::log(1e-10);
  for (int t = 0; t < fm.rows(); ++t) {
    for (int f = 0; f < fm.cols(); ++f) {
      CHECK(fm.frames(t, f) == floor_log);
    }
  }
}

TEST_CASE("logmel of a 1 kHz tone peaks in the nearest filter") {
  Waveform w = sine(1000.0, 1.0);
  FeatureMatrix fm = logmel_features(w);
  const std::vector<double> centers = mel_center_freqs(40, 0.0, 8000.0);
  int nearest = 0;
  for (int f = 1; f < 40; ++f) {
    if (std::abs(centers[f] - 1000.0) < std::abs(centers[nearest] - 1000.0)) {
      nearest = f;
    }
  }
  int hits = 0;
  for (int t = 0; t < fm.rows(); ++t) {
    int argmax = 0;
    for (int f = 1; f < 40; ++f) {
      if (fm.frames(t, f) > fm.frames(t, argmax)) argmax = f;
    }
    if (argmax == nearest) ++hits;
  }
  CHECK(hits >= fm.rows() * 95 / 100);
}

TEST_CASE("logmel matches the naive DFT oracle") {
  Rng rng(23);
  for (int trial = 0; trial < 4; ++trial) {
    Waveform w;
    w.rate = 16000;
    w.samples.resize(400 + size_t(rng.uniform_int(4000)));
    for (double& s : w.samples) s = rng.uniform(-0.8, 0.8);
    FeatureMatrix fm = logmel_features(w);
    auto ref = oracles::naive_logmel(w.samples, w.rate, 40);
    REQUIRE(size_t(fm.rows()) == ref.size());
    for (int t = 0; t < fm.rows(); ++t) {
      for (int f = 0; f < 40; ++f) {
        const double a = fm.frames(t, f), b = ref[t][f];
        const double rel =
            std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-10});
        CHECK(rel < 1e-5);
      }
    }
  }
}

TEST_CASE("logmel is invariant to a DC offset") {
  Rng rng(31);
  Waveform w;
  w.rate = 16000;
  w.samples.resize(3200);
  for (double& s : w.samples) s = rng.uniform(-0.5, 0.5);
  Waveform shifted = w;
  for (double& s : shifted.samples) s += 0.25;
  FeatureMatrix a = logmel_features(w);
  FeatureMatrix b = logmel_features(shifted);
  for (int t = 0; t < a.rows(); ++t) {
    for (int f = 0; f < 40; ++f) {
      CHECK(std::abs(a.frames(t, f) - b.frames(t, f)) < 1e-6);
    }
  }
}

TEST_CASE("scaling the waveform shifts log energies by 2 ln alpha") {
  Rng rng(37);
  Waveform w;
  w.rate = 16000;
  w.samples.resize(3200);
  for (double& s : w.samples) s = rng.uniform(-0.4, 0.4);
  const double alpha = 1.7;
  Waveform scaled = w;
  for (double& s : scaled.samples) s *= alpha;
  FeatureMatrix a = logmel_features(w);
  FeatureMatrix b = logmel_features(scaled);
  const double floor_log = std::log(1e-10);
  const double shift = 2.0 * std::log(alpha);
  for (int t = 0; t < a.rows(); ++t) {
    for (int f = 0; f < 40; ++f) {
      // Valid wherever neither side sits on the floor.
      if (a.frames(t, f) > floor_log + 1.0 &&
          b.frames(t, f) > floor_log + 1.0) {
        CHECK(std::abs(b.frames(t, f) - a.frames(t, f) - shift) < 1e-5);
      }
    }
  }
}

TEST_CASE("pitch of silence is the documented fill") {
  Waveform w;
  w.rate = 16000;
  w.samples.assign(8000, 0.0);
  FeatureMatrix fm = pitch_features(w);
  REQUIRE(fm.cols() == 3);
  for (int t = 0; t < fm.rows(); ++t) {
    CHECK(fm.frames(t, 0) == 0.0);
    CHECK(fm.frames(t, 1) == Catch::Approx(std::log(100.0)));
    CHECK(fm.frames(t, 2) == 0.0);
  }
}

TEST_CASE("pitch tracks a 200 Hz sawtooth") {
  Waveform w;
  w.rate = 16000;
  w.samples.resize(16000);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const double phase = std::fmod(200.0 * i / 16000.0, 1.0);
    w.samples[i] = 0.6 * (2.0 * phase - 1.0);
  }
  FeatureMatrix fm = pitch_features(w);
  std::vector<double> f0;
  int near_zero_delta = 0, voiced = 0;
  for (int t = 0; t < fm.rows(); ++t) {
    if (fm.frames(t, 0) > 0.3) {
      ++voiced;
      f0.push_back(std::exp(fm.frames(t, 1)));
      if (t > 0 && std::abs(fm.frames(t, 2)) < 0.05) ++near_zero_delta;
    }
  }
  REQUIRE(voiced > fm.rows() / 2);
  std::sort(f0.begin(), f0.end());
  const double median = f0[f0.size() / 2];
  CHECK(median > 190.0);
  CHECK(median < 210.0);
  CHECK(near_zero_delta >= (voiced - 1) * 90 / 100);
}

TEST_CASE("feature archive round trip") {
  const std::string path = temp_path("mb_feats.bin");
  SECTION("empty matrix") {
    FeatureMatrix fm;
    fm.frames.resize(0, 40);
    write_features(fm, path);
    FeatureMatrix r = read_features(path);
    CHECK(r.rows() == 0);
    CHECK(r.cols() == 40);
  }
  SECTION("random matrix is bit-exact") {
    Rng rng(5);
    FeatureMatrix fm;
    fm.frames.resize(98, 43);
    for (int t = 0; t < 98; ++t) {
      for (int d = 0; d < 43; ++d) {
        // f32-representable values so the f32 payload is lossless.
        fm.frames(t, d) = double(float(rng.uniform(-50.0, 50.0)));
      }
    }
    fm.frame_shift = 0.010;
    fm.frame_length = 0.025;
    write_features(fm, path);
    FeatureMatrix r = read_features(path);
    REQUIRE(r.rows() == 98);
    REQUIRE(r.cols() == 43);
    CHECK(r.frame_shift == fm.frame_shift);
    CHECK(r.frame_length == fm.frame_length);
    for (int t = 0; t < 98; ++t) {
      for (int d = 0; d < 43; ++d) {
        REQUIRE(r.frames(t, d) == fm.frames(t, d));
      }
    }
  }
  SECTION("truncation is an error, not partial data") {
    FeatureMatrix fm;
    fm.frames = Eigen::MatrixXd::Ones(4, 4);
    write_features(fm, path);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    in.close();
    bytes.resize(bytes.size() - 5);
    write_bytes(path, bytes);
    CHECK_THROWS_AS(read_features(path), FormatError);
  }
  SECTION("bad magic is an error") {
    write_bytes(path, "NOTFEAT\n________________________");
    CHECK_THROWS_AS(read_features(path), FormatError);
  }
}
