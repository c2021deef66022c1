// pcasr/transducer/objectives.h

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

#ifndef PCASR_TRANSDUCER_OBJECTIVES_H_
#define PCASR_TRANSDUCER_OBJECTIVES_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcasr/transducer/model.h"

namespace pcasr::transducer {

struct TrainingExample {
  std::string utterance_id;
  FeatureSequence features;
  LabelSequence y_n;
  std::optional<LabelSequence> y_p;
};

// One transducer loss over a shared encoder pass: decode `labels` in
// `mode`, scaled by `weight` in the gradient.
struct LossTerm {
  ModeId mode;
  std::span<const int> labels;
  double weight = 1.0;
};

// Returns the unweighted loss of every term. When `grad` is non-null,
// accumulates sum_i weight_i * d loss_i / d params into it.
std::vector<double> EvaluateTerms(const TransducerModel& model,
                                  const FeatureSequence& x,
                                  std::span<const LossTerm> terms,
                                  ModelWeights* grad = nullptr);

// rnnt loss of the lattice composed from Encode/Predict/Join.
double SequenceLoss(const TransducerModel& model, const FeatureSequence& x,
                    const LabelSequence& labels);

// L^P on a punctuated-only model.
double LossPunctuatedOnly(const TransducerModel& model,
                          const FeatureSequence& x, const LabelSequence& y_p);

// L^N + L^P, each decoder stack scoring its own reference over the shared
// encoder output.
double Loss2Decoder(const TransducerModel& model, const FeatureSequence& x,
                    const LabelSequence& y_n, const LabelSequence& y_p);

// (1 - alpha) * L^N + alpha * L^P where L^N averages the normalized loss
// over every sample and L^P averages the punctuated loss over the samples
// that carry y_p. Without any y_p in the batch the second term is 0.
double LossConditioned(const TransducerModel& model,
                       std::span<const TrainingExample> batch, LossWeights w,
                       ModelWeights* grad = nullptr);

// Per-architecture mini-batch objective used by the trainer: the batch mean
// of L^P (punct-only), of L^N + L^P (2dec), or LossConditioned (cond).
// Per-sample gradients are computed on up to `threads` workers and summed
// in sample order, so the result is independent of the thread count.
double BatchObjective(const TransducerModel& model,
                      std::span<const TrainingExample* const> batch,
                      LossWeights w, ModelWeights* grad, size_t threads = 1);

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_OBJECTIVES_H_
