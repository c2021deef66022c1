// pcasr/transducer/model.h

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

#ifndef PCASR_TRANSDUCER_MODEL_H_
#define PCASR_TRANSDUCER_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcasr/transducer/rnnt_loss.h"
#include "pcasr/transducer/types.h"

namespace pcasr::transducer {

// Causal strided convolution, a residual causal convolution, then a linear
// projection to encoder_hidden.
struct EncoderWeights {
  Matrix conv1;  // C x (encoder_kernel * input_dim)
  RowVector conv1_bias;
  Matrix conv2;  // C x (encoder_context_kernel * C)
  RowVector conv2_bias;
  Matrix proj;  // H x C
  RowVector proj_bias;
};

// One Predictor + Joiner stack.
struct DecoderWeights {
  Matrix token_embedding;  // V x D; empty for a shared second decoder
  Matrix predictor;        // P x k*(D + M), M = 0 unless mode-conditioned
  RowVector predictor_bias;
  Matrix join_encoder;    // J x H
  Matrix join_predictor;  // J x P
  RowVector join_bias;
  Matrix output;  // V x J
  RowVector output_bias;
};

struct ModelWeights {
  EncoderWeights encoder;
  std::vector<DecoderWeights> decoders;
  Matrix mode_embedding;  // 2 x M for the conditioned predictor, else empty

  ModelWeights ZerosLike() const;
  void SetZero();
  ModelWeights& operator+=(const ModelWeights& other);
  ModelWeights& operator*=(double scale);
  double SquaredNorm() const;
  size_t ParameterCount() const;
  bool operator==(const ModelWeights& other) const;
};

// Calls f(name, tensor) for every parameter tensor in a fixed order. Works
// on const and mutable weights; tensors are Matrix or RowVector.
template <class Weights, class F>
void ForEachParameter(Weights& w, F&& f) {
  f(std::string("encoder.conv1"), w.encoder.conv1);
  f(std::string("encoder.conv1_bias"), w.encoder.conv1_bias);
  f(std::string("encoder.conv2"), w.encoder.conv2);
  f(std::string("encoder.conv2_bias"), w.encoder.conv2_bias);
  f(std::string("encoder.proj"), w.encoder.proj);
  f(std::string("encoder.proj_bias"), w.encoder.proj_bias);
  for (size_t d = 0; d < w.decoders.size(); ++d) {
    const std::string p = "decoder" + std::to_string(d) + ".";
    auto& dec = w.decoders[d];
    f(p + "token_embedding", dec.token_embedding);
    f(p + "predictor", dec.predictor);
    f(p + "predictor_bias", dec.predictor_bias);
    f(p + "join_encoder", dec.join_encoder);
    f(p + "join_predictor", dec.join_predictor);
    f(p + "join_bias", dec.join_bias);
    f(p + "output", dec.output);
    f(p + "output_bias", dec.output_bias);
  }
  f(std::string("mode_embedding"), w.mode_embedding);
}

// Which decoder stack produces an output mode and whether the predictor is
// fed a mode embedding.
struct DecoderRoute {
  size_t decoder = 0;
  std::optional<ModeId> condition;
};

// Intermediate activations kept for backpropagation.
struct EncoderCache {
  Matrix col1, h1, col2, g2, h2;
};

struct DecoderCache {
  DecoderRoute route;
  std::vector<int> histories;  // (U+1) x k token ids, row-major
  Matrix pred_in;              // (U+1) x k*(D+M)
  Matrix pred;                 // (U+1) x P
  Matrix hidden;               // T*(U+1) x J
};

class TransducerModel {
 public:
  // Uniform(-s, s) init with s = 1/sqrt(fan-in). For the conditioned
  // predictor, checks that the mode-embedding columns of the first predictor
  // layer have full column rank so distinct modes give distinct states.
  TransducerModel(const ModelConfig& config, uint64_t seed);
  // All-zero parameters.
  static TransducerModel Zeros(const ModelConfig& config);
  // Throws ConfigError if the tensor shapes disagree with the config.
  TransducerModel(const ModelConfig& config, ModelWeights weights);

  const ModelConfig& config() const { return config_; }
  ModelWeights& weights() { return weights_; }
  const ModelWeights& weights() const { return weights_; }
  size_t num_decoders() const { return weights_.decoders.size(); }

  // Throws ConfigError when the architecture has no such output.
  DecoderRoute RouteFor(ModeId output) const;
  bool Supports(ModeId output) const;

  // T x encoder_hidden with T = ceil(L / downsample). Frame t only reads
  // input frames <= t * downsample.
  Matrix Encode(const FeatureSequence& x) const;

  // Stateless predictor: only the last predictor_context tokens of
  // `history` are used, left-padded with blanks. `condition` must be set
  // exactly when the model is mode-conditioned.
  RowVector Predict(std::span<const int> history,
                    std::optional<ModeId> condition, size_t decoder = 0) const;

  // Log-distribution over the vocabulary (blank included).
  RowVector Join(const RowVector& encoder_state,
                 const RowVector& predictor_state, size_t decoder = 0) const;

  // Joiner output for every (frame, label position) pair of `labels`.
  LogitLattice ComputeLattice(const FeatureSequence& x,
                              std::span<const int> labels,
                              ModeId output) const;

  // Building blocks for loss gradients. The *Backward calls accumulate into
  // `grad`, which must be shaped like weights().
  Matrix EncodeWithCache(const FeatureSequence& x, EncoderCache* cache) const;
  LogitLattice DecoderForward(const Matrix& encoded,
                              std::span<const int> labels,
                              const DecoderRoute& route,
                              DecoderCache* cache) const;
  // `lattice_grad` is d loss / d log-prob; adds d loss / d encoded to
  // *d_encoded.
  void DecoderBackward(const Matrix& encoded, const LogitLattice& lattice,
                       const DecoderCache& cache,
                       const LogitLattice& lattice_grad, ModelWeights* grad,
                       Matrix* d_encoded) const;
  void EncoderBackward(const EncoderCache& cache, const Matrix& d_encoded,
                       ModelWeights* grad) const;

 private:
  explicit TransducerModel(const ModelConfig& config);
  void CheckCondition(std::optional<ModeId> condition) const;
  const Matrix& TokenEmbedding(size_t decoder) const;
  size_t PredictorInputDim() const;
  void FillPredictorInput(std::span<const int> history,
                          std::optional<ModeId> condition, size_t decoder,
                          double* out) const;

  ModelConfig config_;
  ModelWeights weights_;
};

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_MODEL_H_
