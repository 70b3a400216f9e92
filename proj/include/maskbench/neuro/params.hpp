// maskbench/neuro/params.hpp

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

#ifndef MASKBENCH_NEURO_PARAMS_HPP_
#define MASKBENCH_NEURO_PARAMS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/rng.hpp"

namespace maskbench {
namespace neuro {

// The numeric core is templated on the scalar so gradient checking can run
// above double precision (the finite-difference roundoff floor is
// eps * |loss| / h). Training and inference use plain double.
template <typename S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Mat = MatT<double>;
using Vec = VecT<double>;

// Every weight of a model lives here as a named matrix with a parallel
// gradient buffer. The flat index runs over entries in registration order
// (column-major within each matrix), which gives the checkpoint layout and
// the finite-difference probe order.
template <typename S>
class BasicParamStore {
 public:
  using M = MatT<S>;

  struct Entry {
    std::string name;
    M value;
    M grad;
  };

  M& add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    if (index_.count(name)) {
      throw ConsistencyError("duplicate parameter name: " + name);
    }
    index_[name] = entries_.size();
    entries_.push_back({name, M::Zero(rows, cols), M::Zero(rows, cols)});
    flat_size_ += static_cast<size_t>(rows * cols);
    return entries_.back().value;
  }

  M& mat(const std::string& name) { return entries_[at(name)].value; }
  const M& mat(const std::string& name) const {
    return entries_[at(name)].value;
  }
  M& grad(const std::string& name) { return entries_[at(name)].grad; }
  const M& grad(const std::string& name) const {
    return entries_[at(name)].grad;
  }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  size_t flat_size() const { return flat_size_; }

  void zero_grads() {
    for (auto& e : entries_) e.grad.setZero();
  }

  void init_uniform(double lo, double hi, uint64_t seed) {
    Rng rng(seed);
    for (auto& e : entries_) {
      S* p = e.value.data();
      for (Eigen::Index i = 0; i < e.value.size(); ++i) {
        p[i] = static_cast<S>(rng.uniform(lo, hi));
      }
    }
  }

  S get_flat(size_t idx) const {
    const auto [e, off] = locate(idx);
    return entries_[e].value.data()[off];
  }

  void set_flat(size_t idx, S v) {
    const auto [e, off] = locate(idx);
    entries_[e].value.data()[off] = v;
  }

  S grad_flat(size_t idx) const {
    const auto [e, off] = locate(idx);
    return entries_[e].grad.data()[off];
  }

  std::string flat_name(size_t idx) const {
    const auto [e, off] = locate(idx);
    return entries_[e].name + "[" + std::to_string(off) + "]";
  }

  std::vector<S> flatten() const {
    std::vector<S> out;
    out.reserve(flat_size_);
    for (const auto& e : entries_) {
      const S* p = e.value.data();
      out.insert(out.end(), p, p + e.value.size());
    }
    return out;
  }

  void unflatten(const std::vector<S>& flat) {
    if (flat.size() != flat_size_) {
      throw ShapeError("unflatten: got " + std::to_string(flat.size()) +
                       " values for " + std::to_string(flat_size_) +
                       " parameters");
    }
    size_t off = 0;
    for (auto& e : entries_) {
      S* p = e.value.data();
      for (Eigen::Index i = 0; i < e.value.size(); ++i) p[i] = flat[off++];
    }
  }

 private:
  size_t at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
      throw ConsistencyError("unknown parameter: " + name);
    }
    return it->second;
  }

  std::pair<size_t, Eigen::Index> locate(size_t idx) const {
    if (idx >= flat_size_) {
      throw ShapeError("flat index " + std::to_string(idx) + " out of range");
    }
    for (size_t e = 0; e < entries_.size(); ++e) {
      const size_t n = static_cast<size_t>(entries_[e].value.size());
      if (idx < n) return {e, static_cast<Eigen::Index>(idx)};
      idx -= n;
    }
    throw ShapeError("flat index out of range");  // unreachable
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, size_t> index_;
  size_t flat_size_ = 0;
};

using ParamStore = BasicParamStore<double>;

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_PARAMS_HPP_
