// maskbench/bench/derange.hpp

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

#ifndef MASKBENCH_BENCH_DERANGE_HPP_
#define MASKBENCH_BENCH_DERANGE_HPP_

#include <cstdint>
#include <numeric>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/rng.hpp"

namespace maskbench {
namespace bench {

// Seeded Sattolo cycle: a uniform random single-cycle permutation, which by
// construction has no fixed points. A plain shuffle could pair an utterance
// with its own image and silently weaken the incongruency condition.
inline std::vector<size_t> derange(size_t n, uint64_t seed) {
  if (n < 2) {
    throw ConsistencyError("cannot derange fewer than 2 elements");
  }
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), size_t{0});
  Rng rng(seed);
  for (size_t i = n - 1; i > 0; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(i));  // j < i
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace bench
}  // namespace maskbench

#endif  // MASKBENCH_BENCH_DERANGE_HPP_
