// maskbench/neuro/gradcheck.hpp

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

#ifndef MASKBENCH_NEURO_GRADCHECK_HPP_
#define MASKBENCH_NEURO_GRADCHECK_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "maskbench/neuro/params.hpp"
#include "maskbench/rng.hpp"

namespace maskbench {
namespace neuro {

struct GradCheckOptions {
  double step = 1e-4;       // central-difference h
  double tolerance = 1e-4;  // max relative error to pass
  // Check every index up to this many parameters; beyond that, a seeded
  // random subset of subset_size indices.
  size_t full_sweep_limit = 30000;
  size_t subset_size = 500;
  uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  size_t n_checked = 0;
  bool nonfinite_gradient = false;
  std::string nonfinite_param;
  bool pass = false;
};

// Central finite differences against the analytic gradient. The callable
// must compute the scalar loss; when its argument is true it must also
// accumulate gradients into the store (which is zeroed here first). The
// finite-difference roundoff floor is eps*|loss|/h, so checking a deep
// model's near-zero gradients needs a scalar type above double; gradcheck
// fixtures instantiate the model templates with long double.
template <typename S>
GradCheckReport grad_check(BasicParamStore<S>& ps,
                           const std::function<S(bool)>& loss_fn,
                           const GradCheckOptions& opts = {}) {
  GradCheckReport report;

  ps.zero_grads();
  loss_fn(true);
  std::vector<S> analytic(ps.flat_size());
  for (size_t i = 0; i < ps.flat_size(); ++i) {
    analytic[i] = ps.grad_flat(i);
    if (!std::isfinite(static_cast<double>(analytic[i])) &&
        !report.nonfinite_gradient) {
      report.nonfinite_gradient = true;
      report.nonfinite_param = ps.flat_name(i);
    }
  }
  if (report.nonfinite_gradient) {
    report.pass = false;
    return report;
  }

  std::vector<size_t> indices;
  if (ps.flat_size() <= opts.full_sweep_limit) {
    indices.resize(ps.flat_size());
    std::iota(indices.begin(), indices.end(), size_t{0});
  } else {
    Rng rng(derive_seed(opts.seed, "gradcheck-subset"));
    for (size_t k = 0; k < opts.subset_size; ++k) {
      indices.push_back(static_cast<size_t>(rng.uniform_int(ps.flat_size())));
    }
  }

  const S h = static_cast<S>(opts.step);
  for (size_t idx : indices) {
    const S orig = ps.get_flat(idx);
    ps.set_flat(idx, orig + h);
    const S lp = loss_fn(false);
    ps.set_flat(idx, orig - h);
    const S lm = loss_fn(false);
    ps.set_flat(idx, orig);
    const S numeric = (lp - lm) / (S(2) * h);
    const S rel =
        std::abs(analytic[idx] - numeric) /
        std::max({std::abs(analytic[idx]), std::abs(numeric), S(1e-8)});
    if (static_cast<double>(rel) > report.max_rel_err) {
      report.max_rel_err = static_cast<double>(rel);
      report.worst_param = ps.flat_name(idx);
    }
    ++report.n_checked;
  }
  report.pass = report.max_rel_err < opts.tolerance;
  return report;
}

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_GRADCHECK_HPP_
