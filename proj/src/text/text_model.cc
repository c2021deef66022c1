// src/text/text_model.cc

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

#include "pcasr/text/text_model.h"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pcasr/error.h"
#include "pcasr/text/unicode.h"

namespace pcasr::text {

namespace {

bool Contains(const std::vector<char32_t>& set, char32_t c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

std::vector<char32_t> CodePointsFromJson(const nlohmann::json& j,
                                         const char* key) {
  if (!j.is_array()) {
    throw ConfigError(std::string("punctuation config: '") + key +
                      "' must be an array of single characters");
  }
  std::vector<char32_t> out;
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw ConfigError(std::string("punctuation config: '") + key +
                        "' entries must be strings");
    }
    std::u32string cps = DecodeUtf8(NfcNormalize(item.get<std::string>()));
    if (cps.size() != 1) {
      throw ConfigError(std::string("punctuation config: '") + key +
                        "' entry '" + item.get<std::string>() +
                        "' is not a single character");
    }
    out.push_back(cps[0]);
  }
  return out;
}

}  // namespace

std::string_view ViewName(ViewKind view) {
  switch (view) {
    case ViewKind::kPC: return "p-c";
    case ViewKind::kPNC: return "p-nc";
    case ViewKind::kNPC: return "np-c";
    case ViewKind::kNPNC: return "np-nc";
  }
  return "?";
}

std::optional<ViewKind> ParseView(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
  if (n == "pc") return ViewKind::kPC;
  if (n == "pnc") return ViewKind::kPNC;
  if (n == "npc") return ViewKind::kNPC;
  if (n == "npnc") return ViewKind::kNPNC;
  return std::nullopt;
}

PunctuationConfig PunctuationConfig::Default() {
  return PunctuationConfig({U'.', U',', U'?', U'!', U';', U':', U'"', U'\u2014'},
                           {U'\'', U'-'});
}

PunctuationConfig::PunctuationConfig(std::vector<char32_t> marks,
                                     std::vector<char32_t> intra_word_chars)
    : marks_(std::move(marks)), intra_(std::move(intra_word_chars)) {
  for (char32_t c : marks_) {
    if (IsWhitespace(c)) throw ConfigError("punctuation mark is whitespace");
    if (Contains(intra_, c)) {
      throw ConfigError("character '" + EncodeUtf8(c) +
                        "' is both a mark and intra-word");
    }
  }
  for (char32_t c : intra_) {
    if (IsWhitespace(c)) throw ConfigError("intra-word char is whitespace");
  }
}

PunctuationConfig PunctuationConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("punctuation config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "marks" && key != "intra_word_chars") {
      throw ConfigError("punctuation config: unknown key '" + key + "'");
    }
  }
  PunctuationConfig defaults = Default();
  std::vector<char32_t> marks = j.contains("marks")
                                    ? CodePointsFromJson(j["marks"], "marks")
                                    : defaults.marks();
  std::vector<char32_t> intra =
      j.contains("intra_word_chars")
          ? CodePointsFromJson(j["intra_word_chars"], "intra_word_chars")
          : defaults.intra_word_chars();
  return PunctuationConfig(std::move(marks), std::move(intra));
}

PunctuationConfig PunctuationConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open punctuation config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("punctuation config " + path + ": " + e.what());
  }
  return FromJson(j);
}

bool PunctuationConfig::IsMark(char32_t c) const { return Contains(marks_, c); }

bool PunctuationConfig::IsIntraWord(char32_t c) const {
  return Contains(intra_, c);
}

nlohmann::json PunctuationConfig::ToJson() const {
  nlohmann::json marks = nlohmann::json::array();
  for (char32_t c : marks_) marks.push_back(EncodeUtf8(c));
  nlohmann::json intra = nlohmann::json::array();
  for (char32_t c : intra_) intra.push_back(EncodeUtf8(c));
  return {{"marks", marks}, {"intra_word_chars", intra}};
}

std::vector<Token> Tokenize(std::string_view raw,
                            const PunctuationConfig& cfg) {
  std::vector<Token> tokens;
  std::u32string word;
  auto flush = [&] {
    if (!word.empty()) {
      tokens.push_back(Word(EncodeUtf8(word)));
      word.clear();
    }
  };
  for (char32_t c : DecodeUtf8(NfcNormalize(raw))) {
    if (IsWhitespace(c)) {
      flush();
    } else if (cfg.IsMark(c)) {
      flush();
      tokens.push_back(Punct(EncodeUtf8(c)));
    } else {
      word.push_back(c);
    }
  }
  flush();
  return tokens;
}

std::string Detokenize(std::span<const Token> tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && tokens[i].kind == TokenKind::kWord) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

std::vector<Token> Project(std::span<const Token> tokens, ViewKind view) {
  const bool keep_punct = view == ViewKind::kPC || view == ViewKind::kPNC;
  const bool keep_case = view == ViewKind::kPC || view == ViewKind::kNPC;
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::kPunct) {
      if (keep_punct) out.push_back(t);
    } else {
      out.push_back(keep_case ? t : Word(ToLower(t.surface)));
    }
  }
  return out;
}

bool IsCased(const Token& token) {
  if (token.kind != TokenKind::kWord) return false;
  for (char32_t c : DecodeUtf8(token.surface)) {
    if (IsUppercase(c)) return true;
  }
  return false;
}

Transcript Normalize(const Transcript& t) {
  return {t.utterance_id, Project(t.tokens, ViewKind::kNPNC), t.audio_seconds};
}

bool IsErroneous(const Transcript& t) {
  bool any_alpha = false;
  for (const Token& token : t.tokens) {
    if (token.kind != TokenKind::kWord) continue;
    for (char32_t c : DecodeUtf8(token.surface)) {
      if (!IsAlphabetic(c)) continue;
      if (!IsUppercase(c)) return false;
      any_alpha = true;
    }
  }
  return any_alpha;
}

std::string RuleRestorer::Restore(std::string_view text) const {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return "";
  return CapitalizeFirst(text) + ".";
}

std::string CommandRestorer::Restore(std::string_view text) const {
  char path[] = "/tmp/pcasr-restore-XXXXXX";
  const int fd = mkstemp(path);
  if (fd < 0) throw Error("cannot create temporary file for restorer input");
  {
    std::string line(text);
    line += '\n';
    const ssize_t written = write(fd, line.data(), line.size());
    close(fd);
    if (written != static_cast<ssize_t>(line.size())) {
      unlink(path);
      throw Error("cannot write restorer input");
    }
  }
  const std::string cmd = command_ + " < " + path;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    unlink(path);
    throw Error("cannot start restorer command: " + command_);
  }
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  unlink(path);
  if (status != 0) {
    throw Error("restorer command exited with status " +
                std::to_string(status));
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) {
    out.pop_back();
  }
  return out;
}

Transcript Restore(const Transcript& t_norm, const Restorer& restorer,
                   const PunctuationConfig& cfg) {
  for (const Token& t : t_norm.tokens) {
    if (t.kind == TokenKind::kPunct || IsCased(t)) {
      throw RestoreError(t_norm.utterance_id,
                         "input transcript is not normalized");
    }
  }
  std::string restored;
  try {
    restored = restorer.Restore(Detokenize(t_norm.tokens));
  } catch (const std::exception& e) {
    throw RestoreError(t_norm.utterance_id, e.what());
  }
  return {t_norm.utterance_id, Tokenize(restored, cfg), t_norm.audio_seconds};
}

Transcript TranscriptFromJson(const nlohmann::json& j,
                              const PunctuationConfig& cfg) {
  if (!j.is_object()) throw SchemaError("transcript must be a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) {
    throw SchemaError("transcript needs a string 'id'");
  }
  if (!j.contains("text") || !j["text"].is_string()) {
    throw SchemaError("transcript needs a string 'text'");
  }
  Transcript t;
  t.utterance_id = j["id"].get<std::string>();
  t.tokens = Tokenize(j["text"].get<std::string>(), cfg);
  if (j.contains("audio_seconds") && !j["audio_seconds"].is_null()) {
    if (!j["audio_seconds"].is_number() || j["audio_seconds"].get<double>() < 0) {
      throw SchemaError("'audio_seconds' must be a nonnegative number");
    }
    t.audio_seconds = j["audio_seconds"].get<double>();
  }
  return t;
}

nlohmann::json TranscriptToJson(const Transcript& t) {
  nlohmann::json j = {{"id", t.utterance_id}, {"text", Detokenize(t.tokens)}};
  if (t.audio_seconds) j["audio_seconds"] = *t.audio_seconds;
  return j;
}

std::vector<Transcript> ReadTranscripts(std::istream& in,
                                        const PunctuationConfig& cfg) {
  std::vector<Transcript> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(TranscriptFromJson(nlohmann::json::parse(line), cfg));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(e.what(), line_no);
    } catch (const SchemaError& e) {
      throw SchemaError(e.what(), line_no);
    }
  }
  return out;
}

std::vector<Transcript> ReadTranscripts(const std::string& path,
                                        const PunctuationConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return ReadTranscripts(in, cfg);
}

}  // namespace pcasr::text
