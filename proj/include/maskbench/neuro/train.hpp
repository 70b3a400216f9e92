// maskbench/neuro/train.hpp

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

#ifndef MASKBENCH_NEURO_TRAIN_HPP_
#define MASKBENCH_NEURO_TRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "maskbench/error.hpp"
#include "maskbench/neuro/adam.hpp"
#include "maskbench/neuro/lm.hpp"
#include "maskbench/neuro/model.hpp"
#include "maskbench/rng.hpp"

namespace maskbench {
namespace neuro {

struct TrainHyper {
  AdamOptions adam;
  int epochs = 20;
  uint64_t seed = 1;  // parameter init and per-epoch example order
};

struct TrainExample {
  Mat features;             // T x input_dim
  std::vector<int> tokens;  // word ids, no specials
  std::optional<Vec> visual;
};

// Per-example Adam updates in a seeded per-epoch order. The loss curve holds
// each epoch's mean pre-update loss; identical seeds give bit-identical
// curves. NaN loss aborts with the failing epoch.
inline std::vector<double> train(Seq2Seq& model,
                                 std::vector<TrainExample>& dataset,
                                 const TrainHyper& hyper) {
  if (dataset.empty()) throw ConsistencyError("train: empty dataset");
  Adam adam(model.params(), hyper.adam);
  std::vector<double> curve;
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(hyper.seed, "epoch-order", epoch));
    shuffle_rng.shuffle(order);
    double total = 0.0;
    for (size_t idx : order) {
      TrainExample& ex = dataset[idx];
      model.params().zero_grads();
      const double loss = model.sequence_loss(
          ex.features, ex.tokens, ex.visual ? &*ex.visual : nullptr, true);
      total += loss;
      adam.step(model.params());
    }
    const double mean = total / dataset.size();
    if (!std::isfinite(mean)) {
      throw TrainingError("training diverged (non-finite loss) at epoch " +
                              std::to_string(epoch),
                          epoch);
    }
    curve.push_back(mean);
  }
  return curve;
}

inline std::vector<double> train_lm(GruLm& lm,
                                    const std::vector<std::vector<int>>& corpus,
                                    const TrainHyper& hyper) {
  if (corpus.empty()) throw ConsistencyError("train_lm: empty corpus");
  Adam adam(lm.params(), hyper.adam);
  std::vector<double> curve;
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(hyper.seed, "epoch-order", epoch));
    shuffle_rng.shuffle(order);
    double total = 0.0;
    for (size_t idx : order) {
      lm.params().zero_grads();
      total += lm.sequence_loss(corpus[idx], true);
      adam.step(lm.params());
    }
    const double mean = total / corpus.size();
    if (!std::isfinite(mean)) {
      throw TrainingError("lm training diverged (non-finite loss) at epoch " +
                              std::to_string(epoch),
                          epoch);
    }
    curve.push_back(mean);
  }
  return curve;
}

}  // namespace neuro
}  // namespace maskbench

#endif  // MASKBENCH_NEURO_TRAIN_HPP_
