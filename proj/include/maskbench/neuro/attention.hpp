// maskbench/neuro/attention.hpp

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

#ifndef MASKBENCH_NEURO_ATTENTION_HPP_
#define MASKBENCH_NEURO_ATTENTION_HPP_

#include <string>

#include "maskbench/error.hpp"
#include "maskbench/neuro/params.hpp"

namespace maskbench {
namespace neuro {

// Max-shifted softmax; invariant to adding a constant to all scores.
template <typename S>
VecT<S> softmax(const VecT<S>& scores) {
  const S mx = scores.maxCoeff();
  VecT<S> ex = (scores.array() - mx).exp().matrix();
  return ex / ex.sum();
}

// Additive content attention: e_i = v' tanh(Ws s + Wh h_i), alpha =
// softmax(e), context = sum_i alpha_i h_i. The Wh h_i term is precomputed
// once per utterance.
template <typename S>
class BasicAdditiveAttention {
 public:
  using M = MatT<S>;
  using V = VecT<S>;

  BasicAdditiveAttention(std::string prefix, int query_dim, int enc_dim,
                         int attn_dim)
      : prefix_(std::move(prefix)),
        query_dim_(query_dim),
        enc_dim_(enc_dim),
        attn_dim_(attn_dim) {}

  void register_params(BasicParamStore<S>& ps) const {
    ps.add(prefix_ + ".Ws", attn_dim_, query_dim_);
    ps.add(prefix_ + ".Wh", attn_dim_, enc_dim_);
    ps.add(prefix_ + ".v", attn_dim_, 1);
  }

  // Wh * h_i for all i, shared across decoder steps.
  M precompute(const BasicParamStore<S>& ps, const M& enc_states) const {
    if (enc_states.cols() != enc_dim_) {
      throw ShapeError(prefix_ + ": encoder dim " +
                       std::to_string(enc_states.cols()) + " != " +
                       std::to_string(enc_dim_));
    }
    return enc_states * ps.mat(prefix_ + ".Wh").transpose();  // T x a
  }

  struct Cache {
    V query;
    M m;      // T x a, tanh(Ws s + Wh h_i)
    V alpha;  // T
  };

  // Returns the context vector; fills alpha in the cache.
  V forward(const BasicParamStore<S>& ps, const V& query, const M& enc_states,
            const M& precomp, Cache& cache) const {
    if (query.size() != query_dim_) {
      throw ShapeError(prefix_ + ": query dim " +
                       std::to_string(query.size()) + " != " +
                       std::to_string(query_dim_));
    }
    const V q = ps.mat(prefix_ + ".Ws") * query;  // a
    cache.query = query;
    cache.m = ((precomp.rowwise() + q.transpose()).array().tanh()).matrix();
    const V scores = cache.m * ps.mat(prefix_ + ".v").col(0);  // T
    cache.alpha = softmax<S>(scores);
    return enc_states.transpose() * cache.alpha;  // enc_dim
  }

  // dctx is the upstream context gradient. Returns dquery; accumulates
  // parameter gradients and adds the encoder-state gradient into denc.
  V backward(BasicParamStore<S>& ps, const Cache& cache, const M& enc_states,
             const V& dctx, M& denc) const {
    const V v = ps.mat(prefix_ + ".v").col(0);

    // context = enc' alpha.
    denc.noalias() += cache.alpha * dctx.transpose();
    const V dalpha = enc_states * dctx;  // T

    // Softmax backward.
    const S dot = cache.alpha.dot(dalpha);
    const V dscores =
        cache.alpha.cwiseProduct(dalpha - V::Constant(dalpha.size(), dot));

    // scores = m v.
    ps.grad(prefix_ + ".v").col(0).noalias() += cache.m.transpose() * dscores;
    const M dm = dscores * v.transpose();  // T x a
    const M dpre =
        dm.cwiseProduct((S(1) - cache.m.array().square()).matrix());

    // pre = Ws s + Wh h_i (rowwise).
    const V dq = dpre.colwise().sum().transpose();  // a
    ps.grad(prefix_ + ".Ws").noalias() += dq * cache.query.transpose();
    ps.grad(prefix_ + ".Wh").noalias() += dpre.transpose() * enc_states;
    denc.noalias() += dpre * ps.mat(prefix_ + ".Wh");
    return ps.mat(prefix_ + ".Ws").transpose() * dq;
  }

 private:
  std::string prefix_;
  int query_dim_;
  int enc_dim_;
  int attn_dim_;
};

using AdditiveAttention = BasicAdditiveAttention<double>;

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_ATTENTION_HPP_
