// pcasr/transducer/decode.h

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

#ifndef PCASR_TRANSDUCER_DECODE_H_
#define PCASR_TRANSDUCER_DECODE_H_

#include <optional>

#include "pcasr/transducer/model.h"

namespace pcasr::transducer {

inline constexpr size_t kDefaultMaxSymbolsPerFrame = 10;

// Frame-synchronous greedy search: on each encoder frame keep emitting the
// argmax token (ties go to the lower index) until it is blank or
// `max_symbols_per_frame` symbols were emitted, then move to the next frame.
//
// `mode` picks the output: required for 2dec and cond models; a
// punctuated-only model accepts nothing or kPunctuated.
LabelSequence GreedyDecode(
    const TransducerModel& model, const FeatureSequence& x,
    std::optional<ModeId> mode,
    size_t max_symbols_per_frame = kDefaultMaxSymbolsPerFrame);

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_DECODE_H_
