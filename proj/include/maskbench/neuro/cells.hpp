// maskbench/neuro/cells.hpp

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

#ifndef MASKBENCH_NEURO_CELLS_HPP_
#define MASKBENCH_NEURO_CELLS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/neuro/params.hpp"

namespace maskbench {
namespace neuro {

// ---------------------------------------------------------------------------
// LSTM over a whole sequence, single direction. Gate rows are ordered
// [input; forget; cell; output]; cell candidate and cell output use tanh.
// Weights: <prefix>.Wx (4h x in), <prefix>.Wh (4h x h), <prefix>.b (4h x 1).

template <typename S>
class BasicLstmLayer {
 public:
  using M = MatT<S>;
  using V = VecT<S>;

  BasicLstmLayer(std::string prefix, int in_dim, int hidden)
      : prefix_(std::move(prefix)), in_dim_(in_dim), hidden_(hidden) {}

  void register_params(BasicParamStore<S>& ps) const {
    ps.add(prefix_ + ".Wx", 4 * hidden_, in_dim_);
    ps.add(prefix_ + ".Wh", 4 * hidden_, hidden_);
    ps.add(prefix_ + ".b", 4 * hidden_, 1);
  }

  struct Cache {
    M x;             // T x in
    M i, f, g, o;    // T x h gate activations
    M c;             // T x h cell states
    M tanh_c;        // T x h
    M h;             // T x h outputs
  };

  // X is T x in_dim; initial hidden and cell states are zero.
  M forward(const BasicParamStore<S>& ps, const M& x, Cache& cache) const {
    if (x.cols() != in_dim_) {
      throw ShapeError(prefix_ + ": input dim " + std::to_string(x.cols()) +
                       " != " + std::to_string(in_dim_));
    }
    const Eigen::Index T = x.rows();
    const int h = hidden_;
    const M& Wx = ps.mat(prefix_ + ".Wx");
    const M& Wh = ps.mat(prefix_ + ".Wh");
    const V b = ps.mat(prefix_ + ".b").col(0);

    cache.x = x;
    cache.i.resize(T, h);
    cache.f.resize(T, h);
    cache.g.resize(T, h);
    cache.o.resize(T, h);
    cache.c.resize(T, h);
    cache.tanh_c.resize(T, h);
    cache.h.resize(T, h);

    // Input-side projections for every step at once.
    const M pre_in = x * Wx.transpose();  // T x 4h
    V h_prev = V::Zero(h);
    V c_prev = V::Zero(h);
    for (Eigen::Index t = 0; t < T; ++t) {
      const V pre = pre_in.row(t).transpose() + Wh * h_prev + b;
      const V gi =
          (S(1) / (S(1) + (-pre.segment(0, h).array()).exp())).matrix();
      const V gf =
          (S(1) / (S(1) + (-pre.segment(h, h).array()).exp())).matrix();
      const V gg = pre.segment(2 * h, h).array().tanh().matrix();
      const V go =
          (S(1) / (S(1) + (-pre.segment(3 * h, h).array()).exp())).matrix();
      const V c = gf.cwiseProduct(c_prev) + gi.cwiseProduct(gg);
      const V tc = c.array().tanh().matrix();
      const V hh = go.cwiseProduct(tc);
      cache.i.row(t) = gi.transpose();
      cache.f.row(t) = gf.transpose();
      cache.g.row(t) = gg.transpose();
      cache.o.row(t) = go.transpose();
      cache.c.row(t) = c.transpose();
      cache.tanh_c.row(t) = tc.transpose();
      cache.h.row(t) = hh.transpose();
      h_prev = hh;
      c_prev = c;
    }
    return cache.h;
  }

  // dh is T x h upstream; returns T x in_dim input gradient and accumulates
  // parameter gradients.
  M backward(BasicParamStore<S>& ps, const Cache& cache,
             const M& dh_in) const {
    const Eigen::Index T = cache.h.rows();
    const int h = hidden_;
    const M& Wx = ps.mat(prefix_ + ".Wx");
    const M& Wh = ps.mat(prefix_ + ".Wh");

    M dpre_all(T, 4 * h);
    V dh_next = V::Zero(h);
    V dc_next = V::Zero(h);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      const V gi = cache.i.row(t).transpose();
      const V gf = cache.f.row(t).transpose();
      const V gg = cache.g.row(t).transpose();
      const V go = cache.o.row(t).transpose();
      const V tc = cache.tanh_c.row(t).transpose();
      const V c_prev =
          t > 0 ? V(cache.c.row(t - 1).transpose()) : V(V::Zero(h));

      const V dh = dh_in.row(t).transpose() + dh_next;
      const V dc = dh.cwiseProduct(go).cwiseProduct(
                       (S(1) - tc.array().square()).matrix()) +
                   dc_next;
      const V dgo = dh.cwiseProduct(tc);
      const V dgi = dc.cwiseProduct(gg);
      const V dgg = dc.cwiseProduct(gi);
      const V dgf = dc.cwiseProduct(c_prev);
      dc_next = dc.cwiseProduct(gf);

      V dpre(4 * h);
      dpre.segment(0, h) =
          dgi.cwiseProduct(gi).cwiseProduct((S(1) - gi.array()).matrix());
      dpre.segment(h, h) =
          dgf.cwiseProduct(gf).cwiseProduct((S(1) - gf.array()).matrix());
      dpre.segment(2 * h, h) =
          dgg.cwiseProduct((S(1) - gg.array().square()).matrix());
      dpre.segment(3 * h, h) =
          dgo.cwiseProduct(go).cwiseProduct((S(1) - go.array()).matrix());
      dpre_all.row(t) = dpre.transpose();
      dh_next = Wh.transpose() * dpre;
    }

    // h_prev rows: zero, h_0, ..., h_{T-2}.
    M h_prev_all = M::Zero(T, h);
    if (T > 1) h_prev_all.bottomRows(T - 1) = cache.h.topRows(T - 1);

    ps.grad(prefix_ + ".Wx").noalias() += dpre_all.transpose() * cache.x;
    ps.grad(prefix_ + ".Wh").noalias() += dpre_all.transpose() * h_prev_all;
    ps.grad(prefix_ + ".b").col(0).noalias() +=
        dpre_all.colwise().sum().transpose();
    return dpre_all * Wx;
  }

  const std::string& prefix() const { return prefix_; }
  int hidden() const { return hidden_; }
  int in_dim() const { return in_dim_; }

 private:
  std::string prefix_;
  int in_dim_;
  int hidden_;
};

using LstmLayer = BasicLstmLayer<double>;

// ---------------------------------------------------------------------------
// GRU step cell. Gate rows ordered [update; reset; candidate]; the candidate
// applies the reset gate to the recurrent state before the affine map:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r . h) + bn)
//   h' = (1 - z) . n + z . h
// Weights: <prefix>.Wx (3h x in), <prefix>.Wh (3h x h), <prefix>.b (3h x 1).

template <typename S>
class BasicGruCell {
 public:
  using M = MatT<S>;
  using V = VecT<S>;

  BasicGruCell(std::string prefix, int in_dim, int hidden)
      : prefix_(std::move(prefix)), in_dim_(in_dim), hidden_(hidden) {}

  void register_params(BasicParamStore<S>& ps) const {
    ps.add(prefix_ + ".Wx", 3 * hidden_, in_dim_);
    ps.add(prefix_ + ".Wh", 3 * hidden_, hidden_);
    ps.add(prefix_ + ".b", 3 * hidden_, 1);
  }

  struct Cache {
    V x, h_prev;
    V z, r, n, rh;
  };

  V step(const BasicParamStore<S>& ps, const V& x, const V& h_prev,
         Cache& cache) const {
    if (x.size() != in_dim_) {
      throw ShapeError(prefix_ + ": input dim " + std::to_string(x.size()) +
                       " != " + std::to_string(in_dim_));
    }
    const int h = hidden_;
    const M& Wx = ps.mat(prefix_ + ".Wx");
    const M& Wh = ps.mat(prefix_ + ".Wh");
    const V b = ps.mat(prefix_ + ".b").col(0);

    const V px = Wx * x + b;
    cache.x = x;
    cache.h_prev = h_prev;
    const V pz =
        px.segment(0, h) + Wh.block(0, 0, h, hidden_) * h_prev;
    const V pr =
        px.segment(h, h) + Wh.block(h, 0, h, hidden_) * h_prev;
    cache.z = (S(1) / (S(1) + (-pz.array()).exp())).matrix();
    cache.r = (S(1) / (S(1) + (-pr.array()).exp())).matrix();
    cache.rh = cache.r.cwiseProduct(h_prev);
    const V pn =
        px.segment(2 * h, h) + Wh.block(2 * h, 0, h, hidden_) * cache.rh;
    cache.n = pn.array().tanh().matrix();
    return (S(1) - cache.z.array()).matrix().cwiseProduct(cache.n) +
           cache.z.cwiseProduct(h_prev);
  }

  // Returns (dx, dh_prev); accumulates parameter gradients.
  std::pair<V, V> backward(BasicParamStore<S>& ps, const Cache& cache,
                           const V& dh_out) const {
    const int h = hidden_;
    const M& Wx = ps.mat(prefix_ + ".Wx");
    const M& Wh = ps.mat(prefix_ + ".Wh");

    const V dz = dh_out.cwiseProduct(cache.h_prev - cache.n);
    const V dn = dh_out.cwiseProduct((S(1) - cache.z.array()).matrix());
    V dh_prev = dh_out.cwiseProduct(cache.z);

    const V dpre_n =
        dn.cwiseProduct((S(1) - cache.n.array().square()).matrix());
    const V drh = Wh.block(2 * h, 0, h, h).transpose() * dpre_n;
    const V dr = drh.cwiseProduct(cache.h_prev);
    dh_prev += drh.cwiseProduct(cache.r);

    const V dpre_z = dz.cwiseProduct(cache.z).cwiseProduct(
        (S(1) - cache.z.array()).matrix());
    const V dpre_r = dr.cwiseProduct(cache.r).cwiseProduct(
        (S(1) - cache.r.array()).matrix());

    V dpre(3 * h);
    dpre.segment(0, h) = dpre_z;
    dpre.segment(h, h) = dpre_r;
    dpre.segment(2 * h, h) = dpre_n;

    ps.grad(prefix_ + ".Wx").noalias() += dpre * cache.x.transpose();
    M& dWh = ps.grad(prefix_ + ".Wh");
    dWh.block(0, 0, h, h).noalias() += dpre_z * cache.h_prev.transpose();
    dWh.block(h, 0, h, h).noalias() += dpre_r * cache.h_prev.transpose();
    dWh.block(2 * h, 0, h, h).noalias() += dpre_n * cache.rh.transpose();
    ps.grad(prefix_ + ".b").col(0) += dpre;

    dh_prev += Wh.block(0, 0, h, h).transpose() * dpre_z +
               Wh.block(h, 0, h, h).transpose() * dpre_r;
    const V dx = Wx.transpose() * dpre;
    return {dx, dh_prev};
  }

  const std::string& prefix() const { return prefix_; }
  int hidden() const { return hidden_; }
  int in_dim() const { return in_dim_; }

 private:
  std::string prefix_;
  int in_dim_;
  int hidden_;
};

using GruCell = BasicGruCell<double>;

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_CELLS_HPP_
