// maskbench/features.hpp

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

#ifndef MASKBENCH_FEATURES_HPP_
#define MASKBENCH_FEATURES_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/fft.hpp"
#include "maskbench/wav.hpp"

namespace maskbench {
namespace signalio {

struct FeatureMatrix {
  Eigen::MatrixXd frames;  // T x D
  double frame_shift = 0.010;
  double frame_length = 0.025;
  std::vector<std::string> dim_labels;

  int rows() const { return static_cast<int>(frames.rows()); }
  int cols() const { return static_cast<int>(frames.cols()); }
};

// Number of full analysis windows: 0 if n_samples < win*rate, otherwise
// floor((n_samples - win*rate) / (hop*rate)) + 1.
inline long frame_count(long n_samples, int rate, double win, double hop) {
  if (n_samples < 0) throw ShapeError("negative sample count");
  const long win_s = std::lround(win * rate);
  const long hop_s = std::lround(hop * rate);
  if (win_s <= 0 || hop_s <= 0) throw ShapeError("non-positive window or hop");
  if (n_samples < win_s) return 0;
  return (n_samples - win_s) / hop_s + 1;
}

inline double hz_to_mel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

inline double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Triangular filters, linear in mel, over FFT bin center frequencies.
// Row m holds the weights of filter m across bins 0..nfft/2.
inline Eigen::MatrixXd mel_filterbank(int n_mels, size_t nfft, int rate,
                                      double fmin, double fmax) {
  const int n_bins = static_cast<int>(nfft / 2 + 1);
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_mels, n_bins);
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  // n_mels + 2 edge points, equally spaced in mel.
  std::vector<double> pts(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    pts[i] = mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1);
  }
  for (int k = 0; k < n_bins; ++k) {
    const double m = hz_to_mel(static_cast<double>(k) * rate / nfft);
    for (int f = 0; f < n_mels; ++f) {
      const double lo = pts[f], c = pts[f + 1], hi = pts[f + 2];
      if (m >= lo && m <= c && c > lo) {
        fb(f, k) = (m - lo) / (c - lo);
      } else if (m > c && m <= hi && hi > c) {
        fb(f, k) = (hi - m) / (hi - c);
      }
    }
  }
  return fb;
}

// Center frequency (Hz) of each mel filter; used to locate tones.
inline std::vector<double> mel_center_freqs(int n_mels, double fmin,
                                            double fmax) {
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  std::vector<double> centers(n_mels);
  for (int f = 0; f < n_mels; ++f) {
    centers[f] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * (f + 1) / (n_mels + 1));
  }
  return centers;
}

struct LogmelOptions {
  int n_mels = 40;
  double window = 0.025;
  double hop = 0.010;
  double fmin = 0.0;
  double fmax = 0.0;  // 0 means rate / 2
  bool preemphasis = false;
  double preemph_coeff = 0.97;
  double log_floor = 1e-10;
};

inline size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Log mel filterbank energies. Per frame: remove DC, Hann window, zero-pad
// to the next power of two (512 for 400-sample frames), power spectrum,
// triangular mel filters, natural log floored at log_floor.
inline FeatureMatrix logmel_features(const Waveform& w,
                                     const LogmelOptions& opts = {}) {
  const long T = frame_count(static_cast<long>(w.samples.size()), w.rate,
                             opts.window, opts.hop);
  const long win_s = std::lround(opts.window * w.rate);
  const long hop_s = std::lround(opts.hop * w.rate);
  const size_t nfft = next_pow2(static_cast<size_t>(win_s));
  const double fmax = opts.fmax > 0.0 ? opts.fmax : w.rate / 2.0;

  FeatureMatrix fm;
  fm.frame_shift = opts.hop;
  fm.frame_length = opts.window;
  fm.frames.resize(T, opts.n_mels);
  fm.dim_labels.resize(opts.n_mels);
  for (int i = 0; i < opts.n_mels; ++i) {
    fm.dim_labels[i] = "mel" + std::to_string(i);
  }
  if (T == 0) return fm;

  const Eigen::MatrixXd fb =
      mel_filterbank(opts.n_mels, nfft, w.rate, opts.fmin, fmax);
  std::vector<double> hann(win_s);
  for (long i = 0; i < win_s; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (win_s - 1));
  }

  std::vector<double> frame(win_s);
  for (long t = 0; t < T; ++t) {
    const long off = t * hop_s;
    double mean = 0.0;
    for (long i = 0; i < win_s; ++i) mean += w.samples[off + i];
    mean /= win_s;
    for (long i = 0; i < win_s; ++i) frame[i] = w.samples[off + i] - mean;
    if (opts.preemphasis) {
      for (long i = win_s - 1; i > 0; --i) {
        frame[i] -= opts.preemph_coeff * frame[i - 1];
      }
      frame[0] -= opts.preemph_coeff * frame[0];
    }
    for (long i = 0; i < win_s; ++i) frame[i] *= hann[i];

    const std::vector<double> power = power_spectrum(frame, nfft);
    for (int f = 0; f < opts.n_mels; ++f) {
      double e = 0.0;
      for (int k = 0; k < static_cast<int>(power.size()); ++k) {
        e += fb(f, k) * power[k];
      }
      fm.frames(t, f) = std::log(std::max(e, opts.log_floor));
    }
  }
  return fm;
}

struct PitchOptions {
  double window = 0.025;
  double hop = 0.010;
  double f0_min = 60.0;
  double f0_max = 400.0;
  double unvoiced_f0 = 100.0;  // fill for frames with no usable peak
};

// 3-dim pitch contour proxy per frame:
//   col 0: peak normalized cross-correlation in the F0 lag band, in [0, 1]
//   col 1: log F0 at that peak (log unvoiced_f0 when unvoiced)
//   col 2: first difference of col 1 (0 for the first frame)
inline FeatureMatrix pitch_features(const Waveform& w,
                                    const PitchOptions& opts = {}) {
  const long T = frame_count(static_cast<long>(w.samples.size()), w.rate,
                             opts.window, opts.hop);
  const long win_s = std::lround(opts.window * w.rate);
  const long hop_s = std::lround(opts.hop * w.rate);

  FeatureMatrix fm;
  fm.frame_shift = opts.hop;
  fm.frame_length = opts.window;
  fm.frames.resize(T, 3);
  fm.dim_labels = {"pitch_pov", "pitch_logf0", "pitch_dlogf0"};
  if (T == 0) return fm;

  long lag_min = static_cast<long>(std::ceil(w.rate / opts.f0_max));
  long lag_max = static_cast<long>(std::floor(w.rate / opts.f0_min));
  lag_min = std::max<long>(lag_min, 1);
  lag_max = std::min<long>(lag_max, win_s - 2);

  std::vector<double> x(win_s);
  for (long t = 0; t < T; ++t) {
    const long off = t * hop_s;
    double mean = 0.0;
    for (long i = 0; i < win_s; ++i) mean += w.samples[off + i];
    mean /= win_s;
    double energy = 0.0;
    for (long i = 0; i < win_s; ++i) {
      x[i] = w.samples[off + i] - mean;
      energy += x[i] * x[i];
    }

    double best = 0.0;
    long best_lag = 0;
    if (energy > 1e-12) {
      for (long l = lag_min; l <= lag_max; ++l) {
        double num = 0.0, e0 = 0.0, e1 = 0.0;
        for (long i = 0; i + l < win_s; ++i) {
          num += x[i] * x[i + l];
          e0 += x[i] * x[i];
          e1 += x[i + l] * x[i + l];
        }
        const double den = std::sqrt(e0 * e1);
        if (den <= 0.0) continue;
        const double r = num / den;
        if (r > best) {
          best = r;
          best_lag = l;
        }
      }
    }

    if (best_lag == 0) {
      fm.frames(t, 0) = 0.0;
      fm.frames(t, 1) = std::log(opts.unvoiced_f0);
    } else {
      fm.frames(t, 0) = std::min(best, 1.0);
      fm.frames(t, 1) = std::log(static_cast<double>(w.rate) / best_lag);
    }
    fm.frames(t, 2) = t == 0 ? 0.0 : fm.frames(t, 1) - fm.frames(t - 1, 1);
  }
  return fm;
}

// Per-dimension mean/variance normalization, fitted on a training split and
// applied everywhere. Constant dimensions get a floored std so they map to
// zero instead of blowing up.
struct FeatureNormalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd inv_std;

  static FeatureNormalizer fit(const std::vector<const Eigen::MatrixXd*>& mats,
                               double std_floor = 1e-3) {
    if (mats.empty()) throw ConsistencyError("normalizer: no matrices");
    const Eigen::Index dim = mats[0]->cols();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
    long n = 0;
    for (const auto* m : mats) {
      if (m->cols() != dim) throw ShapeError("normalizer: dim mismatch");
      sum += m->colwise().sum().transpose();
      sq += m->array().square().colwise().sum().matrix().transpose();
      n += m->rows();
    }
    if (n == 0) throw ConsistencyError("normalizer: no frames");
    FeatureNormalizer norm;
    norm.mean = sum / n;
    Eigen::VectorXd var =
        (sq / n - norm.mean.cwiseProduct(norm.mean)).cwiseMax(0.0);
    norm.inv_std = (var.array().sqrt().max(std_floor)).inverse().matrix();
    return norm;
  }

  void apply(Eigen::MatrixXd& m) const {
    m = ((m.rowwise() - mean.transpose()).array().rowwise() *
         inv_std.transpose().array())
            .matrix();
  }
};

// Column-wise concat; frame counts must agree.
inline FeatureMatrix hstack(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.frames.rows() != b.frames.rows()) {
    throw ShapeError("feature frame counts differ: " +
                     std::to_string(a.frames.rows()) + " vs " +
                     std::to_string(b.frames.rows()));
  }
  FeatureMatrix out;
  out.frame_shift = a.frame_shift;
  out.frame_length = a.frame_length;
  out.frames.resize(a.frames.rows(), a.frames.cols() + b.frames.cols());
  out.frames << a.frames, b.frames;
  out.dim_labels = a.dim_labels;
  out.dim_labels.insert(out.dim_labels.end(), b.dim_labels.begin(),
                        b.dim_labels.end());
  return out;
}

namespace detail {

constexpr char kFeatMagic[] = "MBFEAT1\n";

inline void put_u32(std::string& out, uint32_t v) { put_u32le(out, v); }

inline void put_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

inline void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32le(out, bits);
}

inline double take_f64(const unsigned char* p) {
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline float take_f32(const unsigned char* p) {
  uint32_t bits = read_u32le(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace detail

// Archive layout: magic "MBFEAT1\n", u32 T, u32 D, f64 frame_shift,
// f64 frame_length, then T*D little-endian f32 values row-major.
inline void write_features(const FeatureMatrix& fm, const std::string& path) {
  std::string out;
  out.append(detail::kFeatMagic, 8);
  detail::put_u32(out, static_cast<uint32_t>(fm.frames.rows()));
  detail::put_u32(out, static_cast<uint32_t>(fm.frames.cols()));
  detail::put_f64(out, fm.frame_shift);
  detail::put_f64(out, fm.frame_length);
  for (Eigen::Index r = 0; r < fm.frames.rows(); ++r) {
    for (Eigen::Index c = 0; c < fm.frames.cols(); ++c) {
      detail::put_f32(out, static_cast<float>(fm.frames(r, c)));
    }
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open feature archive for writing: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write to " + path);
}

inline FeatureMatrix read_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature archive: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 32 || std::memcmp(p, detail::kFeatMagic, 8) != 0) {
    throw FormatError("bad feature archive magic: " + path);
  }
  const uint32_t T = detail::read_u32le(p + 8);
  const uint32_t D = detail::read_u32le(p + 12);
  const double shift = detail::take_f64(p + 16);
  const double length = detail::take_f64(p + 24);
  const size_t want = 32 + static_cast<size_t>(T) * D * 4;
  if (bytes.size() != want) {
    throw FormatError("feature archive size mismatch in " + path + ": have " +
                      std::to_string(bytes.size()) + " bytes, header implies " +
                      std::to_string(want));
  }
  FeatureMatrix fm;
  fm.frame_shift = shift;
  fm.frame_length = length;
  fm.frames.resize(T, D);
  size_t off = 32;
  for (uint32_t r = 0; r < T; ++r) {
    for (uint32_t c = 0; c < D; ++c, off += 4) {
      fm.frames(r, c) = detail::take_f32(p + off);
    }
  }
  fm.dim_labels.resize(D);
  for (uint32_t c = 0; c < D; ++c) fm.dim_labels[c] = "c" + std::to_string(c);
  return fm;
}

}  // namespace signalio
}  // namespace maskbench

#endif  // MASKBENCH_FEATURES_HPP_
