// src/transducer/types.cc

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

#include "pcasr/transducer/types.h"

#include <cmath>

#include "pcasr/error.h"

namespace pcasr::transducer {

std::string_view ModeName(ModeId mode) {
  return mode == ModeId::kNormalized ? "norm" : "punct";
}

std::optional<ModeId> ParseMode(std::string_view name) {
  if (name == "norm" || name == "normalized" || name == "N") {
    return ModeId::kNormalized;
  }
  if (name == "punct" || name == "punctuated" || name == "P") {
    return ModeId::kPunctuated;
  }
  return std::nullopt;
}

std::string_view ArchitectureName(Architecture arch) {
  switch (arch) {
    case Architecture::kPunctuatedOnly: return "punct-only";
    case Architecture::kTwoDecoder: return "2dec";
    case Architecture::kConditionedPredictor: return "cond";
  }
  return "?";
}

std::optional<Architecture> ParseArchitecture(std::string_view name) {
  if (name == "punct-only") return Architecture::kPunctuatedOnly;
  if (name == "2dec") return Architecture::kTwoDecoder;
  if (name == "cond") return Architecture::kConditionedPredictor;
  return std::nullopt;
}

void ModelConfig::Validate() const {
  auto positive = [](size_t v, const char* name) {
    if (v < 1) throw ConfigError(std::string("model config: ") + name + " must be >= 1");
  };
  positive(vocab_size, "vocab_size");
  positive(input_dim, "input_dim");
  positive(token_embed_dim, "token_embed_dim");
  positive(mode_embed_dim, "mode_embed_dim");
  positive(predictor_context, "predictor_context");
  positive(predictor_hidden, "predictor_hidden");
  positive(encoder_hidden, "encoder_hidden");
  positive(encoder_kernel, "encoder_kernel");
  positive(encoder_context_kernel, "encoder_context_kernel");
  positive(encoder_downsample, "encoder_downsample");
  positive(joiner_hidden, "joiner_hidden");
  if (blank_index < 0 || static_cast<size_t>(blank_index) >= vocab_size) {
    throw ConfigError("model config: blank_index must be in [0, vocab_size)");
  }
  if (share_token_embedding && architecture != Architecture::kTwoDecoder) {
    throw ConfigError(
        "model config: share_token_embedding applies to 2dec only");
  }
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"vocab_size", vocab_size},
          {"blank_index", blank_index},
          {"input_dim", input_dim},
          {"token_embed_dim", token_embed_dim},
          {"mode_embed_dim", mode_embed_dim},
          {"predictor_context", predictor_context},
          {"predictor_hidden", predictor_hidden},
          {"encoder_hidden", encoder_hidden},
          {"encoder_kernel", encoder_kernel},
          {"encoder_context_kernel", encoder_context_kernel},
          {"encoder_downsample", encoder_downsample},
          {"joiner_hidden", joiner_hidden},
          {"architecture", std::string(ArchitectureName(architecture))},
          {"share_token_embedding", share_token_embedding}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) {
  return FromJson(j, ModelConfig{});
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j,
                                  const ModelConfig& base) {
  if (!j.is_object()) throw ConfigError("model config must be an object");
  ModelConfig c = base;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "vocab_size") c.vocab_size = v.get<size_t>();
      else if (key == "blank_index") c.blank_index = v.get<int>();
      else if (key == "input_dim") c.input_dim = v.get<size_t>();
      else if (key == "token_embed_dim") c.token_embed_dim = v.get<size_t>();
      else if (key == "mode_embed_dim") c.mode_embed_dim = v.get<size_t>();
      else if (key == "predictor_context") c.predictor_context = v.get<size_t>();
      else if (key == "predictor_hidden") c.predictor_hidden = v.get<size_t>();
      else if (key == "encoder_hidden") c.encoder_hidden = v.get<size_t>();
      else if (key == "encoder_kernel") c.encoder_kernel = v.get<size_t>();
      else if (key == "encoder_context_kernel") c.encoder_context_kernel = v.get<size_t>();
      else if (key == "encoder_downsample") c.encoder_downsample = v.get<size_t>();
      else if (key == "joiner_hidden") c.joiner_hidden = v.get<size_t>();
      else if (key == "share_token_embedding") c.share_token_embedding = v.get<bool>();
      else if (key == "architecture") {
        auto arch = ParseArchitecture(v.get<std::string>());
        if (!arch) throw ConfigError("model config: unknown architecture");
        c.architecture = *arch;
      } else {
        throw ConfigError("model config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  return c;
}

void FeatureSequence::Validate() const {
  if (frames.rows() < 1 || frames.cols() < 1) {
    throw Error("feature sequence must have at least one frame and one dim");
  }
  if (!frames.allFinite()) throw Error("feature sequence has non-finite values");
}

LossWeights::LossWeights(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1]");
  }
}

}  // namespace pcasr::transducer
