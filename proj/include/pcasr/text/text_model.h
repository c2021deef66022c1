// pcasr/text/text_model.h

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

#ifndef PCASR_TEXT_TEXT_MODEL_H_
#define PCASR_TEXT_TEXT_MODEL_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pcasr::text {

enum class TokenKind { kWord, kPunct };

// One alignment unit: a word, or exactly one punctuation mark.
struct Token {
  std::string surface;
  TokenKind kind = TokenKind::kWord;

  bool operator==(const Token&) const = default;
};

inline Token Word(std::string s) { return {std::move(s), TokenKind::kWord}; }
inline Token Punct(std::string s) { return {std::move(s), TokenKind::kPunct}; }

// The four projections of a transcript used by the punctuation/case-aware
// metrics: punctuated+cased, punctuated+uncased, unpunctuated+cased and
// unpunctuated+uncased.
enum class ViewKind { kPC, kPNC, kNPC, kNPNC };

inline constexpr std::array<ViewKind, 4> kAllViews = {
    ViewKind::kPC, ViewKind::kPNC, ViewKind::kNPC, ViewKind::kNPNC};

std::string_view ViewName(ViewKind view);  // "p-c", "p-nc", "np-c", "np-nc"
std::optional<ViewKind> ParseView(std::string_view name);

// Which characters split off as punctuation tokens and which stay inside
// words. The two sets are disjoint and contain no whitespace.
class PunctuationConfig {
 public:
  // { . , ? ! ; : " U+2014 } as marks; apostrophe and hyphen intra-word.
  static PunctuationConfig Default();
  // {"marks": [...], "intra_word_chars": [...]}, each entry one code point.
  // Missing keys fall back to the defaults. Throws ConfigError.
  static PunctuationConfig FromJson(const nlohmann::json& j);
  static PunctuationConfig Load(const std::string& path);

  PunctuationConfig(std::vector<char32_t> marks,
                    std::vector<char32_t> intra_word_chars);

  bool IsMark(char32_t c) const;
  bool IsIntraWord(char32_t c) const;
  const std::vector<char32_t>& marks() const { return marks_; }
  const std::vector<char32_t>& intra_word_chars() const { return intra_; }

  nlohmann::json ToJson() const;

 private:
  std::vector<char32_t> marks_;
  std::vector<char32_t> intra_;
};

struct Transcript {
  std::string utterance_id;
  std::vector<Token> tokens;
  std::optional<double> audio_seconds;

  bool operator==(const Transcript&) const = default;
};

// Splits raw UTF-8 text (NFC-normalized first) into Word and Punct tokens.
// Whitespace separates words; each configured mark becomes its own token.
std::vector<Token> Tokenize(std::string_view raw, const PunctuationConfig& cfg);

// Inverse of Tokenize: words are separated by one space and marks attach to
// the preceding token. Tokenize(Detokenize(t)) == t for well-formed t.
std::string Detokenize(std::span<const Token> tokens);

std::vector<Token> Project(std::span<const Token> tokens, ViewKind view);

// A word is cased when it holds at least one uppercase letter.
bool IsCased(const Token& token);

// P -> N: drops marks and lowercases, keeping id and duration.
Transcript Normalize(const Transcript& t);

// True for transcripts whose letters are all uppercase, such as chapter
// headings ("CHAPTER ONE"). Needs at least one letter.
bool IsErroneous(const Transcript& t);

// Text-in/text-out punctuation and case restoration model.
class Restorer {
 public:
  virtual ~Restorer() = default;
  virtual std::string Restore(std::string_view normalized_text) const = 0;
  virtual std::string Name() const = 0;
};

class IdentityRestorer : public Restorer {
 public:
  std::string Restore(std::string_view text) const override {
    return std::string(text);
  }
  std::string Name() const override { return "identity"; }
};

// Capitalizes the first word and appends a period. Empty text stays empty.
class RuleRestorer : public Restorer {
 public:
  std::string Restore(std::string_view text) const override;
  std::string Name() const override { return "rule"; }
};

// Pipes the text through an external command (via /bin/sh), one utterance
// per invocation; the command's stdout, minus trailing newlines, is the
// restored text. A non-zero exit status is a failure.
class CommandRestorer : public Restorer {
 public:
  explicit CommandRestorer(std::string command) : command_(std::move(command)) {}
  std::string Restore(std::string_view text) const override;
  std::string Name() const override { return "command"; }

 private:
  std::string command_;
};

// Runs `restorer` over a normalized transcript and re-tokenizes its output.
// Throws RestoreError (carrying the utterance id) when the input is not
// normalized or the restorer fails.
Transcript Restore(const Transcript& t_norm, const Restorer& restorer,
                   const PunctuationConfig& cfg);

// {"id": string, "text": string, "audio_seconds": number?}
Transcript TranscriptFromJson(const nlohmann::json& j,
                              const PunctuationConfig& cfg);
nlohmann::json TranscriptToJson(const Transcript& t);

// One JSON object per non-empty line. Throws SchemaError with line numbers.
std::vector<Transcript> ReadTranscripts(const std::string& path,
                                        const PunctuationConfig& cfg);
std::vector<Transcript> ReadTranscripts(std::istream& in,
                                        const PunctuationConfig& cfg);

}  // namespace pcasr::text

#endif  // PCASR_TEXT_TEXT_MODEL_H_
