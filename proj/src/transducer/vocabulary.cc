// src/transducer/vocabulary.cc

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

#include "pcasr/transducer/vocabulary.h"

#include "pcasr/error.h"
#include "pcasr/text/unicode.h"

namespace pcasr::transducer {

CharVocabulary CharVocabulary::Default(const text::PunctuationConfig& cfg) {
  std::vector<std::string> symbols = {std::string(kBlankSymbol), " "};
  for (char c = 'a'; c <= 'z'; ++c) symbols.emplace_back(1, c);
  for (char c = 'A'; c <= 'Z'; ++c) symbols.emplace_back(1, c);
  for (char32_t c : cfg.intra_word_chars()) symbols.push_back(text::EncodeUtf8(c));
  for (char32_t c : cfg.marks()) symbols.push_back(text::EncodeUtf8(c));
  return CharVocabulary(std::move(symbols));
}

CharVocabulary::CharVocabulary(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.empty() || symbols_[0] != kBlankSymbol) {
    throw ConfigError("vocabulary must start with the blank symbol");
  }
  for (size_t i = 1; i < symbols_.size(); ++i) {
    std::u32string cps = text::DecodeUtf8(symbols_[i]);
    if (cps.size() != 1) {
      throw ConfigError("vocabulary entry '" + symbols_[i] +
                        "' is not a single character");
    }
    if (!index_.emplace(cps[0], static_cast<int>(i)).second) {
      throw ConfigError("duplicate vocabulary entry '" + symbols_[i] + "'");
    }
  }
}

std::optional<int> CharVocabulary::Find(char32_t c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> CharVocabulary::Encode(std::string_view text) const {
  std::vector<int> ids;
  for (char32_t c : text::DecodeUtf8(text)) {
    auto id = Find(c);
    if (!id) {
      throw Error("character '" + text::EncodeUtf8(c) +
                  "' is not in the vocabulary");
    }
    ids.push_back(*id);
  }
  return ids;
}

std::string CharVocabulary::Decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (id <= kBlank || static_cast<size_t>(id) >= symbols_.size()) continue;
    out += symbols_[id];
  }
  return out;
}

}  // namespace pcasr::transducer
