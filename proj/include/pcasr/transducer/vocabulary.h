// pcasr/transducer/vocabulary.h

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

#ifndef PCASR_TRANSDUCER_VOCABULARY_H_
#define PCASR_TRANSDUCER_VOCABULARY_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcasr/text/text_model.h"

namespace pcasr::transducer {

// Character-level output vocabulary shared by both output modes. Index 0 is
// the blank; every other entry is one code point.
class CharVocabulary {
 public:
  static constexpr int kBlank = 0;
  static constexpr std::string_view kBlankSymbol = "<blank>";

  // blank, space, a-z, A-Z, the intra-word chars, then the marks.
  static CharVocabulary Default(const text::PunctuationConfig& cfg);

  // symbols[0] must be kBlankSymbol; the rest single code points, unique.
  explicit CharVocabulary(std::vector<std::string> symbols);

  size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::optional<int> Find(char32_t c) const;
  // Throws Error on characters outside the vocabulary.
  std::vector<int> Encode(std::string_view text) const;
  std::string Decode(std::span<const int> ids) const;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<char32_t, int> index_;
};

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_VOCABULARY_H_
