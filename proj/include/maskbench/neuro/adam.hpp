// maskbench/neuro/adam.hpp

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

#ifndef MASKBENCH_NEURO_ADAM_HPP_
#define MASKBENCH_NEURO_ADAM_HPP_

#include <cmath>
#include <vector>

#include "maskbench/neuro/params.hpp"

namespace maskbench {
namespace neuro {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const ParamStore& ps, const AdamOptions& opts = {}) : opts_(opts) {
    for (const auto& e : ps.entries()) {
      m_.push_back(Mat::Zero(e.value.rows(), e.value.cols()));
      v_.push_back(Mat::Zero(e.value.rows(), e.value.cols()));
    }
  }

  // One update from the currently accumulated gradients.
  void step(ParamStore& ps) {
    ++t_;
    const double bc1 = 1.0 - std::pow(opts_.beta1, t_);
    const double bc2 = 1.0 - std::pow(opts_.beta2, t_);
    auto& entries = ps.entries();
    for (size_t i = 0; i < entries.size(); ++i) {
      const Mat& g = entries[i].grad;
      m_[i] = opts_.beta1 * m_[i] + (1.0 - opts_.beta1) * g;
      v_[i] = opts_.beta2 * v_[i].array().matrix() +
              (1.0 - opts_.beta2) * g.cwiseProduct(g);
      const Mat mhat = m_[i] / bc1;
      const Mat vhat = v_[i] / bc2;
      entries[i].value.array() -=
          opts_.lr * mhat.array() / (vhat.array().sqrt() + opts_.eps);
    }
  }

 private:
  AdamOptions opts_;
  long t_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_ADAM_HPP_
