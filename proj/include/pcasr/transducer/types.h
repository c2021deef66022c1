// pcasr/transducer/types.h

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

#ifndef PCASR_TRANSDUCER_TYPES_H_
#define PCASR_TRANSDUCER_TYPES_H_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pcasr::transducer {

// Rows are time steps (or lattice cells); weights are stored out x in and
// applied as X * W^T.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

enum class ModeId { kNormalized = 0, kPunctuated = 1 };

std::string_view ModeName(ModeId mode);  // "norm" / "punct"
std::optional<ModeId> ParseMode(std::string_view name);

enum class Architecture { kPunctuatedOnly, kTwoDecoder, kConditionedPredictor };

std::string_view ArchitectureName(Architecture arch);  // punct-only/2dec/cond
std::optional<Architecture> ParseArchitecture(std::string_view name);

struct ModelConfig {
  size_t vocab_size = 500;
  int blank_index = 0;
  size_t input_dim = 80;
  size_t token_embed_dim = 500;
  size_t mode_embed_dim = 12;
  size_t predictor_context = 2;
  size_t predictor_hidden = 512;
  size_t encoder_hidden = 256;
  // Input frames seen by the strided first convolution.
  size_t encoder_kernel = 4;
  // Encoder frames seen by the second (stride 1) convolution.
  size_t encoder_context_kernel = 3;
  size_t encoder_downsample = 2;
  size_t joiner_hidden = 512;
  Architecture architecture = Architecture::kPunctuatedOnly;
  // TwoDecoder only: both decoders read decoder 0's token embedding.
  bool share_token_embedding = false;

  // Throws ConfigError.
  void Validate() const;

  nlohmann::json ToJson() const;
  // Unknown keys are rejected; missing keys keep `base` values.
  static ModelConfig FromJson(const nlohmann::json& j,
                              const ModelConfig& base);
  static ModelConfig FromJson(const nlohmann::json& j);

  bool operator==(const ModelConfig&) const = default;
};

// L x A acoustic features.
struct FeatureSequence {
  Matrix frames;

  size_t length() const { return static_cast<size_t>(frames.rows()); }
  size_t dim() const { return static_cast<size_t>(frames.cols()); }
  // L >= 1, A >= 1, all finite. Throws Error.
  void Validate() const;
};

// Vocabulary indices of a reference or hypothesis; never holds the blank.
struct LabelSequence {
  std::vector<int> tokens;
  ModeId mode = ModeId::kNormalized;

  bool operator==(const LabelSequence&) const = default;
};

// Weight of the punctuated term in the conditioned-predictor objective.
class LossWeights {
 public:
  explicit LossWeights(double alpha = 0.5);
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_TYPES_H_
