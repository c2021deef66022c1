// pcasr/metrics/alignment.h

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

#ifndef PCASR_METRICS_ALIGNMENT_H_
#define PCASR_METRICS_ALIGNMENT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcasr/text/text_model.h"

namespace pcasr::metrics {

enum class EditOp { kMatch, kSub, kDel, kIns };

struct AlignmentStep {
  std::optional<size_t> ref_index;
  std::optional<size_t> hyp_index;
  EditOp op;

  bool operator==(const AlignmentStep&) const = default;
};

struct AlignmentResult {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t matches = 0;
  std::vector<AlignmentStep> trace;

  int64_t errors() const { return substitutions + deletions + insertions; }
};

// Unit-cost Levenshtein alignment of ref[0..ref_len) against hyp[0..hyp_len).
// `equal(i, j)` compares ref[i] with hyp[j]. On cost ties the backtrace
// (from the sequence ends) prefers Match, then Sub, then Del, then Ins.
AlignmentResult AlignIndices(size_t ref_len, size_t hyp_len,
                             const std::function<bool(size_t, size_t)>& equal);

template <class T, class Equal = std::equal_to<>>
AlignmentResult Align(std::span<const T> ref, std::span<const T> hyp,
                      Equal equal = {}) {
  return AlignIndices(ref.size(), hyp.size(), [&](size_t i, size_t j) {
    return equal(ref[i], hyp[j]);
  });
}

inline AlignmentResult AlignTokens(std::span<const text::Token> ref,
                                   std::span<const text::Token> hyp) {
  return Align<text::Token>(ref, hyp);
}

// sclite-style three-line rendering (REF/HYP/EVAL). Deleted and inserted
// positions are filled with asterisks.
std::string FormatAlignment(std::span<const text::Token> ref,
                            std::span<const text::Token> hyp,
                            const AlignmentResult& alignment);

}  // namespace pcasr::metrics

#endif  // PCASR_METRICS_ALIGNMENT_H_
