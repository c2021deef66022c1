// src/transducer/trainer.cc

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

#include "pcasr/transducer/trainer.h"

#include <cmath>
#include <deque>
#include <random>

#include "pcasr/error.h"
#include "pcasr/pipeline/batching.h"

namespace pcasr::transducer {

nlohmann::json EpochStatsToJson(const EpochStats& s) {
  return {{"epoch", s.epoch},
          {"loss", s.loss},
          {"batches", s.batches},
          {"grad_norm", s.grad_norm}};
}

TrainingResult Train(TransducerModel model,
                     std::span<const TrainingExample> corpus,
                     const TrainerOptions& options, LossWeights weights,
                     uint64_t seed,
                     const std::function<void(const EpochStats&)>& on_epoch) {
  if (corpus.empty()) throw Error("training corpus is empty");
  if (options.batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(options.learning_rate >= 0.0) || !(options.momentum >= 0.0) ||
      !(options.momentum < 1.0) || !(options.clip_norm >= 0.0)) {
    throw ConfigError("invalid optimizer settings");
  }
  const Architecture arch = model.config().architecture;
  std::vector<bool> has_punct;
  for (const TrainingExample& ex : corpus) {
    if (arch != Architecture::kConditionedPredictor && !ex.y_p) {
      throw ConfigError("sample " + ex.utterance_id +
                        " has no punctuated reference; the " +
                        std::string(ArchitectureName(arch)) +
                        " architecture needs one for every sample");
    }
    has_punct.push_back(ex.y_p.has_value());
  }

  std::mt19937_64 rng(seed);
  ModelWeights grad = model.weights().ZerosLike();
  ModelWeights velocity = model.weights().ZerosLike();
  std::deque<double> recent;  // last finite batch losses, for diagnostics
  TrainingResult result{std::move(model), {}};
  TransducerModel& m = result.model;

  for (size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const pipeline::Batches batches =
        arch == Architecture::kConditionedPredictor
            ? pipeline::StratifiedBatches(has_punct, options.batch_size, rng)
            : pipeline::ShuffledBatches(corpus.size(), options.batch_size, rng);
    EpochStats stats;
    stats.epoch = epoch;
    for (const auto& batch : batches) {
      std::vector<const TrainingExample*> samples;
      for (size_t i : batch) samples.push_back(&corpus[i]);
      grad.SetZero();
      const double loss =
          BatchObjective(m, samples, weights, &grad, options.threads);
      const double norm = std::sqrt(grad.SquaredNorm());
      if (!std::isfinite(loss) || !std::isfinite(norm)) {
        throw DivergenceError("non-finite loss in epoch " +
                                  std::to_string(epoch),
                              {recent.begin(), recent.end()});
      }
      recent.push_back(loss);
      if (recent.size() > 10) recent.pop_front();
      stats.loss += loss * static_cast<double>(batch.size());
      stats.grad_norm += norm;
      ++stats.batches;

      if (options.clip_norm > 0.0 && norm > options.clip_norm) {
        grad *= options.clip_norm / norm;
      }
      if (options.momentum > 0.0) {
        velocity *= options.momentum;
        velocity += grad;
      }
      const ModelWeights& step = options.momentum > 0.0 ? velocity : grad;
      std::vector<const double*> src;
      ForEachParameter(step, [&](const std::string&, const auto& t) {
        src.push_back(t.data());
      });
      size_t k = 0;
      ForEachParameter(m.weights(), [&](const std::string&, auto& t) {
        const double* s = src[k++];
        double* d = t.data();
        for (Eigen::Index i = 0; i < t.size(); ++i) {
          d[i] -= options.learning_rate * s[i];
        }
      });
      // A blown-up step leaves non-finite weights; report it here rather
      // than as a malformed lattice on the next batch.
      if (!std::isfinite(m.weights().SquaredNorm())) {
        throw DivergenceError("non-finite parameters after an update in epoch " +
                                  std::to_string(epoch),
                              {recent.begin(), recent.end()});
      }
    }
    stats.loss /= static_cast<double>(corpus.size());
    stats.grad_norm /= static_cast<double>(stats.batches);
    result.log.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

}  // namespace pcasr::transducer
