// maskbench/wav.hpp

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

#ifndef MASKBENCH_WAV_HPP_
#define MASKBENCH_WAV_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "maskbench/error.hpp"

namespace maskbench {
namespace signalio {

// Mono audio, samples normalized to [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int rate = 16000;

  double duration() const {
    return static_cast<double>(samples.size()) / rate;
  }
};

namespace detail {

inline uint32_t read_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

inline uint16_t read_u16le(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

// Accepts RIFF/WAVE, PCM 16-bit, mono only. Integer samples are scaled by
// 1/32768. Anything else (stereo, float, u8, ADPCM) raises
// UnsupportedFormatError rather than silently converting.
inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const size_t n = bytes.size();

  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  uint16_t audio_format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_off = 0, data_len = 0;
  bool have_data = false;

  size_t off = 12;
  while (off + 8 <= n) {
    const char* id = reinterpret_cast<const char*>(p + off);
    uint32_t len = detail::read_u32le(p + off + 4);
    size_t body = off + 8;
    if (body + len > n) {
      throw FormatError("truncated chunk '" + std::string(id, 4) + "' in " +
                        path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw FormatError("fmt chunk too short in " + path);
      audio_format = detail::read_u16le(p + body);
      channels = detail::read_u16le(p + body + 2);
      rate = detail::read_u32le(p + body + 4);
      bits = detail::read_u16le(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
      have_data = true;
    }
    off = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || !have_data) {
    throw FormatError("missing fmt or data chunk in " + path);
  }
  if (audio_format != 1 || bits != 16) {
    throw UnsupportedFormatError("only PCM 16-bit supported: " + path);
  }
  if (channels != 1) {
    throw UnsupportedFormatError("only mono supported (got " +
                                 std::to_string(channels) +
                                 " channels): " + path);
  }
  if (rate == 0) throw FormatError("zero sample rate in " + path);
  if (data_len % 2 != 0) {
    throw FormatError("odd PCM16 data length in " + path);
  }

  Waveform w;
  w.rate = static_cast<int>(rate);
  w.samples.resize(data_len / 2);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    int16_t s = static_cast<int16_t>(detail::read_u16le(p + data_off + 2 * i));
    w.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return w;
}

// PCM16 mono, little-endian; values quantized by round(x * 32768) and
// clamped to [-32768, 32767], the exact inverse of the reader's 1/32768
// scaling, so a round trip moves any in-range sample by at most 1/32768.
inline void write_wav(const Waveform& w, const std::string& path) {
  std::string out;
  const uint32_t data_len = static_cast<uint32_t>(w.samples.size() * 2);
  out.reserve(44 + data_len);
  out.append("RIFF");
  detail::put_u32le(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  detail::put_u32le(out, 16);
  detail::put_u16le(out, 1);  // PCM
  detail::put_u16le(out, 1);  // mono
  detail::put_u32le(out, static_cast<uint32_t>(w.rate));
  detail::put_u32le(out, static_cast<uint32_t>(w.rate) * 2);
  detail::put_u16le(out, 2);
  detail::put_u16le(out, 16);
  out.append("data");
  detail::put_u32le(out, data_len);
  for (double x : w.samples) {
    long q = std::lround(x * 32768.0);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    detail::put_u16le(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open wav file for writing: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write to " + path);
}

}  // namespace signalio
}  // namespace maskbench

#endif  // MASKBENCH_WAV_HPP_
