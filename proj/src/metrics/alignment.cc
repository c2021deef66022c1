// src/metrics/alignment.cc

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

#include "pcasr/metrics/alignment.h"

#include <algorithm>

namespace pcasr::metrics {

AlignmentResult AlignIndices(
    size_t ref_len, size_t hyp_len,
    const std::function<bool(size_t, size_t)>& equal) {
  const size_t cols = hyp_len + 1;
  // cost[i * cols + j]: edit distance between ref[0..i) and hyp[0..j).
  std::vector<int64_t> cost((ref_len + 1) * cols);
  std::vector<uint8_t> same(ref_len * hyp_len);
  for (size_t j = 0; j <= hyp_len; ++j) cost[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= ref_len; ++i) {
    cost[i * cols] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= hyp_len; ++j) {
      const bool eq = equal(i - 1, j - 1);
      same[(i - 1) * hyp_len + (j - 1)] = eq;
      cost[i * cols + j] =
          std::min({cost[(i - 1) * cols + (j - 1)] + (eq ? 0 : 1),
                    cost[(i - 1) * cols + j] + 1, cost[i * cols + (j - 1)] + 1});
    }
  }

  AlignmentResult result;
  size_t i = ref_len, j = hyp_len;
  while (i > 0 || j > 0) {
    const int64_t here = cost[i * cols + j];
    if (i > 0 && j > 0) {
      const bool eq = same[(i - 1) * hyp_len + (j - 1)];
      const int64_t diag = cost[(i - 1) * cols + (j - 1)];
      if (eq && here == diag) {
        result.trace.push_back({i - 1, j - 1, EditOp::kMatch});
        ++result.matches;
        --i, --j;
        continue;
      }
      if (!eq && here == diag + 1) {
        result.trace.push_back({i - 1, j - 1, EditOp::kSub});
        ++result.substitutions;
        --i, --j;
        continue;
      }
    }
    if (i > 0 && here == cost[(i - 1) * cols + j] + 1) {
      result.trace.push_back({i - 1, std::nullopt, EditOp::kDel});
      ++result.deletions;
      --i;
    } else {
      result.trace.push_back({std::nullopt, j - 1, EditOp::kIns});
      ++result.insertions;
      --j;
    }
  }
  std::reverse(result.trace.begin(), result.trace.end());
  return result;
}

std::string FormatAlignment(std::span<const text::Token> ref,
                            std::span<const text::Token> hyp,
                            const AlignmentResult& alignment) {
  std::string ref_line = "REF: ", hyp_line = "HYP: ", eval_line = "EVAL:";
  for (const AlignmentStep& step : alignment.trace) {
    std::string r = step.ref_index ? ref[*step.ref_index].surface : "";
    std::string h = step.hyp_index ? hyp[*step.hyp_index].surface : "";
    std::string e;
    switch (step.op) {
      case EditOp::kMatch: break;
      case EditOp::kSub: e = "S"; break;
      case EditOp::kDel: e = "D"; break;
      case EditOp::kIns: e = "I"; break;
    }
    // Width in bytes is good enough for ASCII-heavy transcripts.
    const size_t width = std::max({r.size(), h.size(), e.size(), size_t{1}});
    if (!step.ref_index) r = std::string(width, '*');
    if (!step.hyp_index) h = std::string(width, '*');
    ref_line += " " + r + std::string(width - r.size(), ' ');
    hyp_line += " " + h + std::string(width - h.size(), ' ');
    eval_line += " " + e + std::string(width - e.size(), ' ');
  }
  auto rtrim = [](std::string s) {
    s.erase(s.find_last_not_of(' ') + 1);
    return s;
  };
  return rtrim(ref_line) + "\n" + rtrim(hyp_line) + "\n" + rtrim(eval_line) +
         "\n";
}

}  // namespace pcasr::metrics
