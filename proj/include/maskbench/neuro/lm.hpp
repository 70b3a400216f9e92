// maskbench/neuro/lm.hpp

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

#ifndef MASKBENCH_NEURO_LM_HPP_
#define MASKBENCH_NEURO_LM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/neuro/cells.hpp"
#include "maskbench/neuro/params.hpp"
#include "maskbench/neuro/vocab.hpp"

namespace maskbench {
namespace neuro {

struct LmConfig {
  int vocab_size = 0;
  int embed_dim = 16;
  int hidden = 32;
};

// Single-layer GRU next-word model over ground-truth left context.
template <typename S>
class BasicGruLm {
 public:
  using M = MatT<S>;
  using V = VecT<S>;

  BasicGruLm(const LmConfig& cfg, uint64_t seed)
      : cfg_(cfg), cell_("lm.gru", cfg.embed_dim, cfg.hidden) {
    if (cfg.vocab_size < 3) {
      throw ShapeError("lm vocab must include the specials");
    }
    params_.add("lm.embed", cfg.vocab_size, cfg.embed_dim);
    cell_.register_params(params_);
    params_.add("lm.Wo", cfg.vocab_size, cfg.hidden);
    params_.add("lm.bo", cfg.vocab_size, 1);
    params_.init_uniform(-0.1, 0.1, seed);
  }

  const LmConfig& config() const { return cfg_; }
  BasicParamStore<S>& params() { return params_; }
  const BasicParamStore<S>& params() const { return params_; }

  // Mean cross-entropy of tokens + </s> given <s> + tokens.
  S sequence_loss(const std::vector<int>& tokens, bool with_grad) {
    const int steps = static_cast<int>(tokens.size()) + 1;
    const M& E = params_.mat("lm.embed");
    const M& Wo = params_.mat("lm.Wo");
    const V bo = params_.mat("lm.bo").col(0);

    std::vector<typename BasicGruCell<S>::Cache> caches(steps);
    std::vector<V> states(steps);
    std::vector<int> in_ids(steps), targets(steps);
    M probs(steps, cfg_.vocab_size);

    V h = V::Zero(cfg_.hidden);
    S loss = S(0);
    for (int t = 0; t < steps; ++t) {
      in_ids[t] = t == 0 ? Vocabulary::kBos : tokens[t - 1];
      targets[t] = t < steps - 1 ? tokens[t] : Vocabulary::kEos;
      const V x = E.row(in_ids[t]).transpose();
      h = cell_.step(params_, x, h, caches[t]);
      states[t] = h;
      const V logits = Wo * h + bo;
      const S mx = logits.maxCoeff();
      const V ex = (logits.array() - mx).exp().matrix();
      const S z = ex.sum();
      probs.row(t) = (ex / z).transpose();
      loss += std::log(z) + mx - logits(targets[t]);
    }
    loss /= S(steps);
    if (!with_grad) return loss;

    V carry = V::Zero(cfg_.hidden);
    const S inv_steps = S(1) / S(steps);
    for (int t = steps - 1; t >= 0; --t) {
      V dlogits = probs.row(t).transpose();
      dlogits(targets[t]) -= S(1);
      dlogits *= inv_steps;
      params_.grad("lm.Wo").noalias() += dlogits * states[t].transpose();
      params_.grad("lm.bo").col(0) += dlogits;
      const V dh = Wo.transpose() * dlogits + carry;
      auto [dx, dh_prev] = cell_.backward(params_, caches[t], dh);
      carry = dh_prev;
      params_.grad("lm.embed").row(in_ids[t]) += dx.transpose();
    }
    return loss;
  }

  // Vocabulary ranking (best first) for the next word after consuming
  // <s> + context. Specials never appear in the ranking; ties break toward
  // the lower token id.
  std::vector<int> rank_next(const std::vector<int>& context) const {
    const M& E = params_.mat("lm.embed");
    V h = V::Zero(cfg_.hidden);
    typename BasicGruCell<S>::Cache scratch;
    std::vector<int> seq;
    seq.push_back(Vocabulary::kBos);
    seq.insert(seq.end(), context.begin(), context.end());
    for (int id : seq) {
      const V x = E.row(id).transpose();
      h = cell_.step(params_, x, h, scratch);
    }
    const V logits = params_.mat("lm.Wo") * h + params_.mat("lm.bo").col(0);
    std::vector<int> ids;
    for (int i = 3; i < cfg_.vocab_size; ++i) ids.push_back(i);
    std::stable_sort(ids.begin(), ids.end(),
                     [&](int a, int b) { return logits(a) > logits(b); });
    return ids;
  }

 private:
  LmConfig cfg_;
  BasicGruCell<S> cell_;
  BasicParamStore<S> params_;
};

using GruLm = BasicGruLm<double>;

// Ranked predictions (top k tokens, best first) for each masked position,
// conditioning on the ground-truth left context only.
inline std::vector<std::vector<std::string>> lm_predict(
    const GruLm& lm, const Vocabulary& vocab,
    const std::vector<std::string>& tokens,
    const std::vector<int>& masked_positions, int top_k = 10) {
  std::vector<std::vector<std::string>> out;
  for (int pos : masked_positions) {
    if (pos < 0 || pos >= static_cast<int>(tokens.size())) {
      throw ConsistencyError("lm_predict: masked position " +
                             std::to_string(pos) + " out of range");
    }
    std::vector<int> context;
    for (int i = 0; i < pos; ++i) context.push_back(vocab.id(tokens[i]));
    const std::vector<int> ranked = lm.rank_next(context);
    std::vector<std::string> words;
    for (int i = 0; i < top_k && i < static_cast<int>(ranked.size()); ++i) {
      words.push_back(vocab.token(ranked[i]));
    }
    out.push_back(std::move(words));
  }
  return out;
}

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_LM_HPP_
