// src/transducer/decode.cc

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

#include "pcasr/transducer/decode.h"

#include "pcasr/error.h"

namespace pcasr::transducer {

LabelSequence GreedyDecode(const TransducerModel& model,
                           const FeatureSequence& x,
                           std::optional<ModeId> mode,
                           size_t max_symbols_per_frame) {
  if (!mode) {
    if (model.config().architecture != Architecture::kPunctuatedOnly) {
      throw ConfigError("decoding this model needs an output mode");
    }
    mode = ModeId::kPunctuated;
  }
  const DecoderRoute route = model.RouteFor(*mode);
  const int blank = model.config().blank_index;
  const Matrix encoded = model.Encode(x);

  LabelSequence out;
  out.mode = *mode;
  RowVector pred = model.Predict(out.tokens, route.condition, route.decoder);
  for (Eigen::Index t = 0; t < encoded.rows(); ++t) {
    const RowVector enc = encoded.row(t);
    for (size_t emitted = 0; emitted < max_symbols_per_frame; ++emitted) {
      const RowVector logp = model.Join(enc, pred, route.decoder);
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < logp.size(); ++k) {
        if (logp[k] > logp[best]) best = k;
      }
      if (best == blank) break;
      out.tokens.push_back(static_cast<int>(best));
      pred = model.Predict(out.tokens, route.condition, route.decoder);
    }
  }
  return out;
}

}  // namespace pcasr::transducer
