// maskbench/neuro/standard_checks.hpp

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

#ifndef MASKBENCH_NEURO_STANDARD_CHECKS_HPP_
#define MASKBENCH_NEURO_STANDARD_CHECKS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "maskbench/neuro/attention.hpp"
#include "maskbench/neuro/cells.hpp"
#include "maskbench/neuro/gradcheck.hpp"
#include "maskbench/neuro/lm.hpp"
#include "maskbench/neuro/model.hpp"
#include "maskbench/rng.hpp"

namespace maskbench {
namespace neuro {

// Desk-scale dimensions for the standard verification graphs.
struct StandardCheckDims {
  int enc_input = 5;
  int enc_hidden = 5;
  int vocab = 11;
  int embed = 4;
  int dec_hidden = 5;
  int attn = 4;
  int frames = 7;
  int visual = 3;
  uint64_t seed = 1234;
};

// The seven verification graphs: fusion projection, attention, one LSTM
// layer, one GRU layer, full unimodal model, full multimodal model, GRU LM.
// Run in long double so the finite-difference floor sits far below the
// tolerance.
inline std::vector<std::pair<std::string, GradCheckReport>>
run_standard_gradchecks(const StandardCheckDims& dims = {},
                        const GradCheckOptions& opts = {}) {
  using LS = long double;
  using M = MatT<LS>;
  using V = VecT<LS>;
  std::vector<std::pair<std::string, GradCheckReport>> out;

  Rng rng(derive_seed(dims.seed, "standard-gradchecks"));
  auto rmat = [&](int r, int c) {
    M m(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) m(i, j) = (LS)rng.uniform(-1.0, 1.0);
    }
    return m;
  };
  auto rvec = [&](int n) {
    V v(n);
    for (int i = 0; i < n; ++i) v(i) = (LS)rng.uniform(-1.0, 1.0);
    return v;
  };

  {  // fusion projection alone
    BasicParamStore<LS> ps;
    ps.add("fusion.Wf", dims.dec_hidden, dims.visual);
    ps.add("fusion.bf", dims.dec_hidden, 1);
    ps.init_uniform(-0.5, 0.5, derive_seed(dims.seed, "fuse"));
    const V f = rvec(dims.visual);
    const V target = rvec(dims.dec_hidden);
    auto loss = [&](bool with_grad) -> LS {
      const V fp = ((ps.mat("fusion.Wf") * f + ps.mat("fusion.bf").col(0))
                        .array()
                        .tanh())
                       .matrix();
      const V diff = fp - target;
      if (with_grad) {
        const V dpre =
            diff.cwiseProduct((LS(1) - fp.array().square()).matrix());
        ps.grad("fusion.Wf").noalias() += dpre * f.transpose();
        ps.grad("fusion.bf").col(0) += dpre;
      }
      return LS(0.5) * diff.squaredNorm();
    };
    out.push_back({"fusion", grad_check<LS>(ps, loss, opts)});
  }

  {  // attention alone
    BasicAdditiveAttention<LS> attn("attn", dims.dec_hidden,
                                    2 * dims.enc_hidden, dims.attn);
    BasicParamStore<LS> ps;
    attn.register_params(ps);
    ps.init_uniform(-0.5, 0.5, derive_seed(dims.seed, "attn"));
    const M H = rmat(dims.frames, 2 * dims.enc_hidden);
    const V query = rvec(dims.dec_hidden);
    const V target = rvec(2 * dims.enc_hidden);
    auto loss = [&](bool with_grad) -> LS {
      typename BasicAdditiveAttention<LS>::Cache cache;
      const M pre = attn.precompute(ps, H);
      const V ctx = attn.forward(ps, query, H, pre, cache);
      const V diff = ctx - target;
      if (with_grad) {
        M denc = M::Zero(H.rows(), H.cols());
        attn.backward(ps, cache, H, diff, denc);
      }
      return LS(0.5) * diff.squaredNorm();
    };
    out.push_back({"attention", grad_check<LS>(ps, loss, opts)});
  }

  {  // one LSTM layer
    BasicLstmLayer<LS> lstm("lstm", dims.enc_input, dims.enc_hidden);
    BasicParamStore<LS> ps;
    lstm.register_params(ps);
    ps.init_uniform(-0.4, 0.4, derive_seed(dims.seed, "lstm"));
    const M x = rmat(dims.frames, dims.enc_input);
    const M target = rmat(dims.frames, dims.enc_hidden);
    auto loss = [&](bool with_grad) -> LS {
      typename BasicLstmLayer<LS>::Cache cache;
      const M h = lstm.forward(ps, x, cache);
      const M diff = h - target;
      if (with_grad) lstm.backward(ps, cache, diff);
      return LS(0.5) * diff.squaredNorm();
    };
    out.push_back({"lstm", grad_check<LS>(ps, loss, opts)});
  }

  {  // one GRU layer over a short sequence
    BasicGruCell<LS> gru("gru", dims.enc_input, dims.dec_hidden);
    BasicParamStore<LS> ps;
    gru.register_params(ps);
    ps.init_uniform(-0.4, 0.4, derive_seed(dims.seed, "gru"));
    std::vector<V> xs, targets;
    for (int t = 0; t < dims.frames; ++t) {
      xs.push_back(rvec(dims.enc_input));
      targets.push_back(rvec(dims.dec_hidden));
    }
    auto loss = [&](bool with_grad) -> LS {
      std::vector<typename BasicGruCell<LS>::Cache> caches(dims.frames);
      std::vector<V> hs(dims.frames);
      V h_prev = V::Zero(dims.dec_hidden);
      LS total = 0;
      for (int t = 0; t < dims.frames; ++t) {
        hs[t] = gru.step(ps, xs[t], h_prev, caches[t]);
        total += LS(0.5) * (hs[t] - targets[t]).squaredNorm();
        h_prev = hs[t];
      }
      if (with_grad) {
        V carry = V::Zero(dims.dec_hidden);
        for (int t = dims.frames - 1; t >= 0; --t) {
          auto [dx, dh_prev] =
              gru.backward(ps, caches[t], V(hs[t] - targets[t] + carry));
          carry = dh_prev;
        }
      }
      return total;
    };
    out.push_back({"gru", grad_check<LS>(ps, loss, opts)});
  }

  ModelConfig mc;
  mc.encoder.input_dim = dims.enc_input;
  mc.encoder.hidden = dims.enc_hidden;
  mc.encoder.n_layers = 6;
  mc.encoder.subsample_after = {3, 4};
  mc.decoder.vocab_size = dims.vocab;
  mc.decoder.embed_dim = dims.embed;
  mc.decoder.hidden = dims.dec_hidden;
  mc.decoder.attention_dim = dims.attn;

  const M features = rmat(dims.frames, dims.enc_input);
  std::vector<int> tokens;
  for (int i = 0; i < 4; ++i) {
    tokens.push_back(3 + static_cast<int>(rng.uniform_int(dims.vocab - 3)));
  }

  {  // full unimodal model
    mc.visual_dim = 0;
    BasicSeq2Seq<LS> model(mc, derive_seed(dims.seed, "uni"));
    auto loss = [&](bool with_grad) -> LS {
      return model.sequence_loss(features, tokens, nullptr, with_grad);
    };
    out.push_back({"unimodal", grad_check<LS>(model.params(), loss, opts)});
  }

  {  // full multimodal model
    mc.visual_dim = dims.visual;
    BasicSeq2Seq<LS> model(mc, derive_seed(dims.seed, "multi"));
    const V visual = rvec(dims.visual);
    auto loss = [&](bool with_grad) -> LS {
      return model.sequence_loss(features, tokens, &visual, with_grad);
    };
    out.push_back({"multimodal", grad_check<LS>(model.params(), loss, opts)});
  }

  {  // GRU language model
    LmConfig lc;
    lc.vocab_size = dims.vocab;
    lc.embed_dim = dims.embed;
    lc.hidden = dims.dec_hidden;
    BasicGruLm<LS> lm(lc, derive_seed(dims.seed, "lm"));
    auto loss = [&](bool with_grad) -> LS {
      return lm.sequence_loss(tokens, with_grad);
    };
    out.push_back({"gru_lm", grad_check<LS>(lm.params(), loss, opts)});
  }

  return out;
}

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_STANDARD_CHECKS_HPP_
