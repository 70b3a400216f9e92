// maskbench/neuro/encoder.hpp

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

#ifndef MASKBENCH_NEURO_ENCODER_HPP_
#define MASKBENCH_NEURO_ENCODER_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/neuro/cells.hpp"

namespace maskbench {
namespace neuro {

struct EncoderConfig {
  int input_dim = 43;
  int hidden = 32;
  int n_layers = 6;
  // Even-indexed timesteps are kept after these layers (1-based).
  std::vector<int> subsample_after = {3, 4};
};

// Stack of bidirectional LSTM layers with frame subsampling. Output is
// T' x 2*hidden with T' = ceil(ceil(T/2)/2) under the default config.
template <typename S>
class BasicEncoder {
 public:
  using M = MatT<S>;

  explicit BasicEncoder(const EncoderConfig& cfg) : cfg_(cfg) {
    int in = cfg.input_dim;
    for (int l = 0; l < cfg.n_layers; ++l) {
      const std::string base = "enc.l" + std::to_string(l);
      fwd_.emplace_back(base + ".fwd", in, cfg.hidden);
      bwd_.emplace_back(base + ".bwd", in, cfg.hidden);
      in = 2 * cfg.hidden;
    }
  }

  void register_params(BasicParamStore<S>& ps) const {
    for (int l = 0; l < cfg_.n_layers; ++l) {
      fwd_[l].register_params(ps);
      bwd_[l].register_params(ps);
    }
  }

  int out_dim() const { return 2 * cfg_.hidden; }

  // Output length after all subsampling layers.
  long out_len(long T) const {
    for (int l = 1; l <= cfg_.n_layers; ++l) {
      if (subsampled(l)) T = (T + 1) / 2;
    }
    return T;
  }

  struct Cache {
    std::vector<typename BasicLstmLayer<S>::Cache> fwd, bwd;
    std::vector<long> in_len;  // input length per layer
  };

  M forward(const BasicParamStore<S>& ps, const M& features,
            Cache& cache) const {
    if (features.rows() == 0) {
      throw ConsistencyError("encoder: empty input (no frames)");
    }
    if (features.cols() != cfg_.input_dim) {
      throw ShapeError("encoder: feature dim " +
                       std::to_string(features.cols()) + " != " +
                       std::to_string(cfg_.input_dim));
    }
    cache.fwd.resize(cfg_.n_layers);
    cache.bwd.resize(cfg_.n_layers);
    cache.in_len.resize(cfg_.n_layers);

    M x = features;
    for (int l = 0; l < cfg_.n_layers; ++l) {
      cache.in_len[l] = x.rows();
      const M hf = fwd_[l].forward(ps, x, cache.fwd[l]);
      const M hb =
          reverse_rows(bwd_[l].forward(ps, reverse_rows(x), cache.bwd[l]));
      M y(x.rows(), 2 * cfg_.hidden);
      y << hf, hb;
      if (subsampled(l + 1)) y = even_rows(y);
      x = std::move(y);
    }
    return x;
  }

  void backward(BasicParamStore<S>& ps, const Cache& cache,
                const M& dh_top) const {
    M dy = dh_top;
    for (int l = cfg_.n_layers - 1; l >= 0; --l) {
      if (subsampled(l + 1)) dy = expand_even_rows(dy, cache.in_len[l]);
      const int h = cfg_.hidden;
      const M dx_f = fwd_[l].backward(ps, cache.fwd[l], dy.leftCols(h));
      const M dx_b = reverse_rows(
          bwd_[l].backward(ps, cache.bwd[l], reverse_rows(dy.rightCols(h))));
      dy = dx_f + dx_b;
    }
    // dy is now the gradient wrt the input features; the features are data,
    // not parameters, so it is dropped.
  }

  const EncoderConfig& config() const { return cfg_; }

 private:
  bool subsampled(int layer_1based) const {
    return std::find(cfg_.subsample_after.begin(), cfg_.subsample_after.end(),
                     layer_1based) != cfg_.subsample_after.end();
  }

  static M reverse_rows(const M& m) { return m.colwise().reverse(); }

  static M even_rows(const M& m) {
    M out((m.rows() + 1) / 2, m.cols());
    for (Eigen::Index t = 0; t < out.rows(); ++t) out.row(t) = m.row(2 * t);
    return out;
  }

  static M expand_even_rows(const M& m, long full_len) {
    M out = M::Zero(full_len, m.cols());
    for (Eigen::Index t = 0; t < m.rows(); ++t) out.row(2 * t) = m.row(t);
    return out;
  }

  EncoderConfig cfg_;
  std::vector<BasicLstmLayer<S>> fwd_, bwd_;
};

using Encoder = BasicEncoder<double>;

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_ENCODER_HPP_
