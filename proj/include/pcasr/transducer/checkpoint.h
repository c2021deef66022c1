// pcasr/transducer/checkpoint.h

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

#ifndef PCASR_TRANSDUCER_CHECKPOINT_H_
#define PCASR_TRANSDUCER_CHECKPOINT_H_

#include <string>

#include "json.hpp"
#include "pcasr/transducer/model.h"
#include "pcasr/transducer/vocabulary.h"

namespace pcasr::transducer {

inline constexpr int kCheckpointVersion = 1;
inline constexpr std::string_view kCheckpointFormat = "pcasr-transducer";

struct Checkpoint {
  TransducerModel model;
  CharVocabulary vocabulary;
};

// JSON container:
//   {"format": "pcasr-transducer", "version": 1, "config": {...},
//    "vocabulary": [...],
//    "parameters": [{"name", "rows", "cols", "data": [...]}, ...]}
// Doubles are written with round-trip precision. Empty tensors are omitted.
nlohmann::json CheckpointToJson(const TransducerModel& model,
                                const CharVocabulary& vocabulary);
// Throws ConfigError on a missing/unknown version or mismatched shapes.
Checkpoint CheckpointFromJson(const nlohmann::json& j);

void SaveCheckpoint(const std::string& path, const TransducerModel& model,
                    const CharVocabulary& vocabulary);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_CHECKPOINT_H_
