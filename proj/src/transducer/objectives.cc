// src/transducer/objectives.cc

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

#include "pcasr/transducer/objectives.h"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "pcasr/error.h"

namespace pcasr::transducer {

namespace {

void RequireArchitecture(const TransducerModel& model, Architecture arch) {
  if (model.config().architecture != arch) {
    throw ConfigError("objective needs a " +
                      std::string(ArchitectureName(arch)) + " model, got " +
                      std::string(ArchitectureName(model.config().architecture)));
  }
}

// Terms and final combination of one sample within a batch.
struct SamplePlan {
  std::vector<LossTerm> terms;
  int n_index = -1;  // position of the normalized term in `terms`
  int p_index = -1;
};

double Mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> EvaluateTerms(const TransducerModel& model,
                                  const FeatureSequence& x,
                                  std::span<const LossTerm> terms,
                                  ModelWeights* grad) {
  const int blank = model.config().blank_index;
  std::vector<double> losses;
  losses.reserve(terms.size());
  if (grad == nullptr) {
    const Matrix encoded = model.Encode(x);
    for (const LossTerm& term : terms) {
      const LogitLattice lattice = model.DecoderForward(
          encoded, term.labels, model.RouteFor(term.mode), nullptr);
      losses.push_back(RnntLoss(lattice, term.labels, blank));
    }
    return losses;
  }
  EncoderCache enc_cache;
  const Matrix encoded = model.EncodeWithCache(x, &enc_cache);
  Matrix d_encoded = Matrix::Zero(encoded.rows(), encoded.cols());
  for (const LossTerm& term : terms) {
    DecoderCache cache;
    const LogitLattice lattice = model.DecoderForward(
        encoded, term.labels, model.RouteFor(term.mode), &cache);
    RnntLossAndGrad lg = RnntLossGrad(lattice, term.labels, blank);
    losses.push_back(lg.loss);
    lg.grad.values() *= term.weight;
    model.DecoderBackward(encoded, lattice, cache, lg.grad, grad, &d_encoded);
  }
  model.EncoderBackward(enc_cache, d_encoded, grad);
  return losses;
}

double SequenceLoss(const TransducerModel& model, const FeatureSequence& x,
                    const LabelSequence& labels) {
  const LossTerm term{labels.mode, labels.tokens, 1.0};
  return EvaluateTerms(model, x, std::span(&term, 1))[0];
}

double LossPunctuatedOnly(const TransducerModel& model,
                          const FeatureSequence& x, const LabelSequence& y_p) {
  RequireArchitecture(model, Architecture::kPunctuatedOnly);
  const LossTerm term{ModeId::kPunctuated, y_p.tokens, 1.0};
  return EvaluateTerms(model, x, std::span(&term, 1))[0];
}

double Loss2Decoder(const TransducerModel& model, const FeatureSequence& x,
                    const LabelSequence& y_n, const LabelSequence& y_p) {
  RequireArchitecture(model, Architecture::kTwoDecoder);
  const LossTerm terms[] = {{ModeId::kNormalized, y_n.tokens, 1.0},
                            {ModeId::kPunctuated, y_p.tokens, 1.0}};
  const std::vector<double> l = EvaluateTerms(model, x, terms);
  return l[0] + l[1];
}

double BatchObjective(const TransducerModel& model,
                      std::span<const TrainingExample* const> batch,
                      LossWeights w, ModelWeights* grad, size_t threads) {
  if (batch.empty()) throw Error("empty batch");
  const Architecture arch = model.config().architecture;
  const double n = static_cast<double>(batch.size());
  const size_t n_punct = static_cast<size_t>(
      std::count_if(batch.begin(), batch.end(),
                    [](const TrainingExample* e) { return e->y_p.has_value(); }));
  const double alpha = w.alpha();

  std::vector<SamplePlan> plans(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const TrainingExample& ex = *batch[i];
    SamplePlan& plan = plans[i];
    auto add = [&plan](ModeId mode, const LabelSequence& y, double weight) {
      plan.terms.push_back({mode, y.tokens, weight});
      return static_cast<int>(plan.terms.size()) - 1;
    };
    switch (arch) {
      case Architecture::kPunctuatedOnly:
        if (!ex.y_p) throw Error("sample " + ex.utterance_id + " lacks y_p");
        plan.p_index = add(ModeId::kPunctuated, *ex.y_p, 1.0 / n);
        break;
      case Architecture::kTwoDecoder:
        if (!ex.y_p) throw Error("sample " + ex.utterance_id + " lacks y_p");
        plan.n_index = add(ModeId::kNormalized, ex.y_n, 1.0 / n);
        plan.p_index = add(ModeId::kPunctuated, *ex.y_p, 1.0 / n);
        break;
      case Architecture::kConditionedPredictor:
        if (alpha < 1.0) {
          plan.n_index = add(ModeId::kNormalized, ex.y_n, (1.0 - alpha) / n);
        }
        if (alpha > 0.0 && ex.y_p) {
          plan.p_index = add(ModeId::kPunctuated, *ex.y_p,
                             alpha / static_cast<double>(n_punct));
        }
        break;
    }
  }

  std::vector<std::vector<double>> losses(batch.size());
  std::vector<ModelWeights> grads;
  if (grad) grads.assign(batch.size(), grad->ZerosLike());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (size_t i = next++; i < batch.size(); i = next++) {
      try {
        losses[i] = EvaluateTerms(model, batch[i]->features, plans[i].terms,
                                  grad ? &grads[i] : nullptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  threads = std::clamp<size_t>(threads, 1, batch.size());
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  if (grad) {
    for (const ModelWeights& g : grads) *grad += g;
  }

  std::vector<double> ln, lp;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (plans[i].n_index >= 0) ln.push_back(losses[i][plans[i].n_index]);
    if (plans[i].p_index >= 0) lp.push_back(losses[i][plans[i].p_index]);
  }
  switch (arch) {
    case Architecture::kPunctuatedOnly:
      return Mean(lp);
    case Architecture::kTwoDecoder:
      return Mean(ln) + Mean(lp);
    case Architecture::kConditionedPredictor: {
      const double term_n = ln.empty() ? 0.0 : (1.0 - alpha) * Mean(ln);
      const double term_p = lp.empty() ? 0.0 : alpha * Mean(lp);
      return term_n + term_p;
    }
  }
  return 0.0;
}

double LossConditioned(const TransducerModel& model,
                       std::span<const TrainingExample> batch, LossWeights w,
                       ModelWeights* grad) {
  RequireArchitecture(model, Architecture::kConditionedPredictor);
  std::vector<const TrainingExample*> ptrs;
  for (const TrainingExample& e : batch) ptrs.push_back(&e);
  return BatchObjective(model, ptrs, w, grad);
}

}  // namespace pcasr::transducer
