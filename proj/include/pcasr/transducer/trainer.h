// pcasr/transducer/trainer.h

// Copyright 2026  The pcasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PCASR_TRANSDUCER_TRAINER_H_
#define PCASR_TRANSDUCER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "pcasr/transducer/objectives.h"

namespace pcasr::transducer {

struct TrainerOptions {
  size_t epochs = 50;
  size_t batch_size = 8;
  double learning_rate = 0.05;
  // 0 gives plain SGD.
  double momentum = 0.0;
  // Rescale the batch gradient to at most this L2 norm; 0 disables.
  double clip_norm = 0.0;
  // Workers for per-sample gradients; results do not depend on it.
  size_t threads = 1;
};

struct EpochStats {
  size_t epoch = 0;  // 1-based
  // Batch objectives, measured before each update, averaged over the epoch
  // with batch sizes as weights.
  double loss = 0.0;
  size_t batches = 0;
  double grad_norm = 0.0;  // mean pre-clipping batch gradient norm
};

nlohmann::json EpochStatsToJson(const EpochStats& stats);

struct TrainingResult {
  TransducerModel model;
  std::vector<EpochStats> log;
};

// Mini-batch SGD (optionally with momentum) on the architecture's objective.
// Sample order is reshuffled every epoch from `seed`; for the conditioned
// predictor the batches are stratified so each one carries the corpus share
// of punctuated samples. Throws DivergenceError on a non-finite loss.
TrainingResult Train(TransducerModel model,
                     std::span<const TrainingExample> corpus,
                     const TrainerOptions& options, LossWeights weights,
                     uint64_t seed,
                     const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_TRAINER_H_
