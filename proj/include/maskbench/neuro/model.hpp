// maskbench/neuro/model.hpp

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

#ifndef MASKBENCH_NEURO_MODEL_HPP_
#define MASKBENCH_NEURO_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/neuro/attention.hpp"
#include "maskbench/neuro/cells.hpp"
#include "maskbench/neuro/encoder.hpp"
#include "maskbench/neuro/params.hpp"
#include "maskbench/neuro/vocab.hpp"

namespace maskbench {
namespace neuro {

struct DecoderConfig {
  int vocab_size = 0;
  int embed_dim = 32;
  int hidden = 64;
  int n_layers = 2;
  int attention_dim = 32;
};

struct ModelConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  // 0 for the unimodal model; otherwise the dimension of the per-utterance
  // visual feature that is projected and concatenated to the decoder input.
  int visual_dim = 0;
};

// Attention encoder-decoder with optional early decoder fusion. The visual
// vector is projected once per utterance, f' = tanh(Wf f + bf), and f' is
// concatenated to the token embedding at every decoder step. The attention
// query is the top GRU layer's previous state; the first decoder layer's
// input at step t is [embed(y_{t-1}); f'; context_t].
template <typename S>
class BasicSeq2Seq {
 public:
  using M = MatT<S>;
  using V = VecT<S>;

  BasicSeq2Seq(const ModelConfig& cfg, uint64_t seed)
      : cfg_(cfg),
        encoder_(cfg.encoder),
        attention_("dec.attn", cfg.decoder.hidden, 2 * cfg.encoder.hidden,
                   cfg.decoder.attention_dim) {
    if (cfg.decoder.vocab_size < 3) {
      throw ShapeError("decoder vocab must include the specials");
    }
    const int ctx_dim = 2 * cfg_.encoder.hidden;
    int in = cfg_.decoder.embed_dim +
             (multimodal() ? cfg_.decoder.hidden : 0) + ctx_dim;
    for (int l = 0; l < cfg_.decoder.n_layers; ++l) {
      dec_layers_.emplace_back("dec.l" + std::to_string(l), in,
                               cfg_.decoder.hidden);
      in = cfg_.decoder.hidden;
    }

    encoder_.register_params(params_);
    params_.add("dec.embed", cfg_.decoder.vocab_size, cfg_.decoder.embed_dim);
    if (multimodal()) {
      params_.add("fusion.Wf", cfg_.decoder.hidden, cfg_.visual_dim);
      params_.add("fusion.bf", cfg_.decoder.hidden, 1);
    }
    attention_.register_params(params_);
    for (const auto& cell : dec_layers_) cell.register_params(params_);
    params_.add("dec.Wo", cfg_.decoder.vocab_size, cfg_.decoder.hidden);
    params_.add("dec.bo", cfg_.decoder.vocab_size, 1);
    params_.init_uniform(-0.1, 0.1, seed);
  }

  bool multimodal() const { return cfg_.visual_dim > 0; }
  const ModelConfig& config() const { return cfg_; }
  BasicParamStore<S>& params() { return params_; }
  const BasicParamStore<S>& params() const { return params_; }
  const BasicEncoder<S>& encoder() const { return encoder_; }

  // f' = tanh(Wf f + bf); every component lies in (-1, 1).
  V fuse(const V& visual) const {
    if (!multimodal()) {
      throw ConsistencyError("fuse called on a unimodal model");
    }
    if (visual.size() != cfg_.visual_dim) {
      throw ShapeError("visual feature dim " + std::to_string(visual.size()) +
                       " != " + std::to_string(cfg_.visual_dim));
    }
    return (params_.mat("fusion.Wf") * visual +
            params_.mat("fusion.bf").col(0))
        .array()
        .tanh()
        .matrix();
  }

  struct DecoderState {
    std::vector<V> s;  // one per GRU layer
  };

  DecoderState initial_state() const {
    DecoderState st;
    st.s.assign(cfg_.decoder.n_layers, V::Zero(cfg_.decoder.hidden));
    return st;
  }

  struct StepResult {
    V logits;
    V alpha;
    DecoderState state;
  };

  M attention_precompute(const M& enc_states) const {
    return attention_.precompute(params_, enc_states);
  }

  // One decoder step, forward only. `precomp` is attention_precompute(H).
  StepResult decode_step(int prev_token, const DecoderState& state,
                         const M& enc_states, const M& precomp,
                         const V* fprime) const {
    if (multimodal() != (fprime != nullptr)) {
      throw ShapeError(
          "fused vector must be supplied iff the model is multimodal");
    }
    typename BasicAdditiveAttention<S>::Cache attn_cache;
    const V ctx = attention_.forward(params_, state.s.back(), enc_states,
                                     precomp, attn_cache);
    V x = step_input(prev_token, fprime, ctx);
    StepResult out;
    out.state.s.resize(dec_layers_.size());
    typename BasicGruCell<S>::Cache scratch;
    for (size_t l = 0; l < dec_layers_.size(); ++l) {
      out.state.s[l] = dec_layers_[l].step(params_, x, state.s[l], scratch);
      x = out.state.s[l];
    }
    out.logits = params_.mat("dec.Wo") * x + params_.mat("dec.bo").col(0);
    out.alpha = attn_cache.alpha;
    return out;
  }

  // Teacher-forced mean cross-entropy over the target sequence
  // tokens + </s>, with <s> prepended on the input side. Accumulates
  // parameter gradients when with_grad is set.
  S sequence_loss(const M& features, const std::vector<int>& tokens,
                  const V* visual, bool with_grad) {
    typename BasicEncoder<S>::Cache enc_cache;
    const M H = encoder_.forward(params_, features, enc_cache);
    const M HW = attention_.precompute(params_, H);

    V fprime;
    if (multimodal()) {
      if (visual == nullptr) {
        throw ConsistencyError("multimodal model needs a visual feature");
      }
      fprime = fuse(*visual);
    } else if (visual != nullptr) {
      throw ConsistencyError("unimodal model given a visual feature");
    }

    const int steps = static_cast<int>(tokens.size()) + 1;
    const int n_layers = cfg_.decoder.n_layers;
    const M& Wo = params_.mat("dec.Wo");
    const V bo = params_.mat("dec.bo").col(0);

    std::vector<typename BasicAdditiveAttention<S>::Cache> attn_caches(steps);
    std::vector<std::vector<typename BasicGruCell<S>::Cache>> cell_caches(
        steps, std::vector<typename BasicGruCell<S>::Cache>(n_layers));
    M probs(steps, cfg_.decoder.vocab_size);
    std::vector<int> in_ids(steps), targets(steps);
    std::vector<std::vector<V>> states(steps);

    std::vector<V> prev(n_layers, V::Zero(cfg_.decoder.hidden));
    S loss = S(0);
    for (int t = 0; t < steps; ++t) {
      in_ids[t] = t == 0 ? Vocabulary::kBos : tokens[t - 1];
      targets[t] = t < steps - 1 ? tokens[t] : Vocabulary::kEos;
      check_token(in_ids[t]);
      check_token(targets[t]);

      const V ctx =
          attention_.forward(params_, prev.back(), H, HW, attn_caches[t]);
      V x = step_input(in_ids[t], multimodal() ? &fprime : nullptr, ctx);
      states[t].resize(n_layers);
      for (int l = 0; l < n_layers; ++l) {
        states[t][l] =
            dec_layers_[l].step(params_, x, prev[l], cell_caches[t][l]);
        x = states[t][l];
      }
      const V logits = Wo * states[t].back() + bo;
      const S mx = logits.maxCoeff();
      const V ex = (logits.array() - mx).exp().matrix();
      const S z = ex.sum();
      probs.row(t) = (ex / z).transpose();
      loss += std::log(z) + mx - logits(targets[t]);
      prev = states[t];
    }
    loss /= S(steps);
    if (!with_grad) return loss;

    // Backward pass.
    M dH = M::Zero(H.rows(), H.cols());
    V dfprime = V::Zero(cfg_.decoder.hidden);
    std::vector<V> carry(n_layers, V::Zero(cfg_.decoder.hidden));
    const S inv_steps = S(1) / S(steps);
    for (int t = steps - 1; t >= 0; --t) {
      V dlogits = probs.row(t).transpose();
      dlogits(targets[t]) -= S(1);
      dlogits *= inv_steps;

      params_.grad("dec.Wo").noalias() +=
          dlogits * states[t].back().transpose();
      params_.grad("dec.bo").col(0) += dlogits;

      V dsl = Wo.transpose() * dlogits + carry[n_layers - 1];
      V dx_below;
      for (int l = n_layers - 1; l >= 0; --l) {
        auto [dx, dh_prev] =
            dec_layers_[l].backward(params_, cell_caches[t][l], dsl);
        carry[l] = dh_prev;
        dx_below = dx;
        if (l > 0) dsl = dx_below + carry[l - 1];
      }

      // Split the first layer's input gradient.
      int off = 0;
      const V de = dx_below.segment(off, cfg_.decoder.embed_dim);
      off += cfg_.decoder.embed_dim;
      if (multimodal()) {
        dfprime += dx_below.segment(off, cfg_.decoder.hidden);
        off += cfg_.decoder.hidden;
      }
      const V dctx = dx_below.segment(off, 2 * cfg_.encoder.hidden);

      params_.grad("dec.embed").row(in_ids[t]) += de.transpose();
      const V dquery =
          attention_.backward(params_, attn_caches[t], H, dctx, dH);
      carry[n_layers - 1] += dquery;
    }

    if (multimodal()) {
      const V dpre =
          dfprime.cwiseProduct((S(1) - fprime.array().square()).matrix());
      params_.grad("fusion.Wf").noalias() += dpre * visual->transpose();
      params_.grad("fusion.bf").col(0) += dpre;
    }
    encoder_.backward(params_, enc_cache, dH);
    return loss;
  }

  // Argmax decoding; ties break toward the lowest token id. Stops at </s>
  // (not included in the output) or after max_len tokens.
  std::vector<int> greedy_decode(const M& features, const V* visual,
                                 int max_len) const {
    std::vector<int> out;
    if (max_len <= 0) return out;
    typename BasicEncoder<S>::Cache enc_cache;
    const M H = encoder_.forward(params_, features, enc_cache);
    const M HW = attention_.precompute(params_, H);
    V fprime;
    const V* fp = nullptr;
    if (multimodal()) {
      if (visual == nullptr) {
        throw ConsistencyError("multimodal model needs a visual feature");
      }
      fprime = fuse(*visual);
      fp = &fprime;
    }
    DecoderState st = initial_state();
    int prev = Vocabulary::kBos;
    for (int t = 0; t < max_len; ++t) {
      StepResult res = decode_step(prev, st, H, HW, fp);
      Eigen::Index best;
      res.logits.maxCoeff(&best);
      if (static_cast<int>(best) == Vocabulary::kEos) break;
      out.push_back(static_cast<int>(best));
      st = std::move(res.state);
      prev = static_cast<int>(best);
    }
    return out;
  }

 private:
  void check_token(int id) const {
    if (id < 0 || id >= cfg_.decoder.vocab_size) {
      throw ShapeError("token id " + std::to_string(id) +
                       " outside vocab of " +
                       std::to_string(cfg_.decoder.vocab_size));
    }
  }

  V step_input(int token, const V* fprime, const V& ctx) const {
    const int ctx_dim = 2 * cfg_.encoder.hidden;
    const int total = cfg_.decoder.embed_dim +
                      (multimodal() ? cfg_.decoder.hidden : 0) + ctx_dim;
    V x(total);
    int off = 0;
    x.segment(off, cfg_.decoder.embed_dim) =
        params_.mat("dec.embed").row(token).transpose();
    off += cfg_.decoder.embed_dim;
    if (multimodal()) {
      x.segment(off, cfg_.decoder.hidden) = *fprime;
      off += cfg_.decoder.hidden;
    }
    x.segment(off, ctx_dim) = ctx;
    return x;
  }

  ModelConfig cfg_;
  BasicEncoder<S> encoder_;
  BasicAdditiveAttention<S> attention_;
  std::vector<BasicGruCell<S>> dec_layers_;
  BasicParamStore<S> params_;
};

using Seq2Seq = BasicSeq2Seq<double>;

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_MODEL_HPP_
