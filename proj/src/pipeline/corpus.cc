// src/pipeline/corpus.cc

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

#include "pcasr/pipeline/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "pcasr/error.h"

namespace pcasr::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view PunctSourceName(PunctSource source) {
  switch (source) {
    case PunctSource::kOriginal: return "original";
    case PunctSource::kAuto: return "auto";
    case PunctSource::kAbsent: return "absent";
  }
  return "absent";
}

Corpus::Corpus(std::vector<Sample> samples) : samples_(std::move(samples)) {
  std::unordered_set<std::string> seen;
  for (const Sample& s : samples_) {
    if (!seen.insert(s.utterance_id).second)
      throw Error("duplicate utterance id '" + s.utterance_id + "'");
    if (s.y_p.has_value() != (s.y_p_source != PunctSource::kAbsent))
      throw Error("sample '" + s.utterance_id +
                  "': y_p presence disagrees with its source");
  }
}

size_t Corpus::PunctuatedCount() const {
  return std::count_if(samples_.begin(), samples_.end(),
                       [](const Sample& s) { return s.y_p.has_value(); });
}

double Corpus::PunctuationFraction() const {
  if (samples_.empty()) return 0.0;
  return static_cast<double>(PunctuatedCount()) / samples_.size();
}

json DroppedToJson(const DroppedSample& d) {
  return {{"id", d.utterance_id}, {"line", d.line}, {"reason", d.reason}};
}

namespace {

transducer::FeatureSequence FramesFromJson(const json& j) {
  if (!j.is_array() || j.empty())
    throw Error("'frames' must be a non-empty array of arrays");
  size_t dim = 0;
  transducer::FeatureSequence seq;
  for (size_t t = 0; t < j.size(); ++t) {
    const json& row = j[t];
    if (!row.is_array() || row.empty())
      throw Error("frame " + std::to_string(t) + " is not a non-empty array");
    if (t == 0) {
      dim = row.size();
      seq.frames.resize(static_cast<Eigen::Index>(j.size()),
                        static_cast<Eigen::Index>(dim));
    } else if (row.size() != dim) {
      throw Error("frame " + std::to_string(t) + " has dimension " +
                  std::to_string(row.size()) + ", expected " +
                  std::to_string(dim));
    }
    for (size_t a = 0; a < dim; ++a) {
      if (!row[a].is_number()) throw Error("non-numeric feature value");
      seq.frames(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a)) =
          row[a].get<double>();
    }
  }
  seq.Validate();
  return seq;
}

json FramesToJson(const transducer::FeatureSequence& seq) {
  json rows = json::array();
  for (Eigen::Index t = 0; t < seq.frames.rows(); ++t) {
    json row = json::array();
    for (Eigen::Index a = 0; a < seq.frames.cols(); ++a)
      row.push_back(seq.frames(t, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Reads a JSONL file line by line, handing (line number, object) to `f`.
template <typename F>
void ForEachJsonLine(const std::string& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw SchemaError("expected a JSON object", line_no);
    f(line_no, j);
  }
}

const std::string* OptionalString(const json& row, const char* key,
                                  size_t line) {
  auto it = row.find(key);
  if (it == row.end() || it->is_null()) return nullptr;
  if (!it->is_string())
    throw SchemaError(std::string("'") + key + "' must be a string", line);
  return it->get_ptr<const std::string*>();
}

bool IsNormalized(const std::vector<text::Token>& tokens) {
  for (const text::Token& t : tokens)
    if (t.kind == text::TokenKind::kPunct || text::IsCased(t)) return false;
  return true;
}

}  // namespace

std::vector<FeatureRow> ReadFeatureRows(const std::string& path) {
  std::vector<FeatureRow> rows;
  ForEachJsonLine(path, [&](size_t line, const json& j) {
    static const std::set<std::string> kKeys = {"id", "frames",
                                                "audio_seconds"};
    for (const auto& [key, value] : j.items())
      if (!kKeys.count(key)) throw SchemaError("unknown key '" + key + "'", line);
    FeatureRow row;
    const std::string* id = OptionalString(j, "id", line);
    if (!id) throw SchemaError("missing 'id'", line);
    row.utterance_id = *id;
    if (!j.contains("frames")) throw SchemaError("missing 'frames'", line);
    try {
      row.features = FramesFromJson(j.at("frames"));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(e.what(), line);
    }
    if (auto it = j.find("audio_seconds"); it != j.end() && !it->is_null()) {
      if (!it->is_number() || it->get<double>() < 0)
        throw SchemaError("'audio_seconds' must be a non-negative number", line);
      row.audio_seconds = it->get<double>();
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

json FeatureRowToJson(const FeatureRow& row) {
  json j = {{"id", row.utterance_id}, {"frames", FramesToJson(row.features)}};
  if (row.audio_seconds) j["audio_seconds"] = *row.audio_seconds;
  return j;
}

IngestResult Ingest(const std::string& path,
                    const text::PunctuationConfig& cfg) {
  static const std::set<std::string> kKeys = {
      "id",       "text_punct",    "text_norm",          "features",
      "audio_seconds", "punct_source", "text_punct_original"};
  IngestResult result;
  std::vector<Sample> samples;
  std::unordered_map<std::string, size_t> first_line;
  // Feature files are loaded lazily, once each.
  std::unordered_map<std::string,
                     std::unordered_map<std::string, FeatureRow>> feature_files;
  const fs::path base = fs::path(path).parent_path();

  ForEachJsonLine(path, [&](size_t line, const json& row) {
    for (const auto& [key, value] : row.items())
      if (!kKeys.count(key)) throw SchemaError("unknown key '" + key + "'", line);
    const std::string* id = OptionalString(row, "id", line);
    if (!id) throw SchemaError("missing 'id'", line);
    if (auto [it, inserted] = first_line.emplace(*id, line); !inserted)
      throw SchemaError("duplicate id '" + *id + "' (first seen on line " +
                            std::to_string(it->second) + ")",
                        line);
    const std::string* punct = OptionalString(row, "text_punct", line);
    const std::string* norm = OptionalString(row, "text_norm", line);
    const std::string* original = OptionalString(row, "text_punct_original", line);
    const std::string* source = OptionalString(row, "punct_source", line);
    const std::string* features = OptionalString(row, "features", line);
    if (!punct && !norm)
      throw SchemaError("row needs 'text_punct' or 'text_norm'", line);

    Sample s;
    s.utterance_id = *id;
    if (auto it = row.find("audio_seconds"); it != row.end() && !it->is_null()) {
      if (!it->is_number() || it->get<double>() < 0)
        throw SchemaError("'audio_seconds' must be a non-negative number", line);
      s.audio_seconds = it->get<double>();
    }
    auto drop = [&](std::string reason) {
      result.dropped.push_back({*id, line, std::move(reason)});
    };

    if (punct) {
      s.y_p = text::Transcript{*id, text::Tokenize(*punct, cfg), s.audio_seconds};
      s.y_p_source = PunctSource::kOriginal;
      if (source) {
        if (*source == "auto") {
          s.y_p_source = PunctSource::kAuto;
        } else if (*source != "original") {
          throw SchemaError("'punct_source' must be \"original\" or \"auto\"",
                            line);
        }
      }
      if (text::IsErroneous(*s.y_p))
        return drop("erroneous: punctuated text is fully uppercase");
    } else if (source || original) {
      throw SchemaError("'punct_source' and 'text_punct_original' need "
                        "'text_punct'", line);
    }
    if (original)
      s.original_y_p =
          text::Transcript{*id, text::Tokenize(*original, cfg), s.audio_seconds};

    if (norm) {
      s.y_n = text::Transcript{*id, text::Tokenize(*norm, cfg), s.audio_seconds};
      if (!IsNormalized(s.y_n.tokens))
        return drop("inconsistent: text_norm contains marks or uppercase");
      if (s.y_p && text::Normalize(*s.y_p).tokens != s.y_n.tokens)
        return drop("inconsistent: text_punct does not normalize to text_norm");
    } else {
      s.y_n = text::Normalize(*s.y_p);
    }

    if (features) {
      const std::string feature_path = (base / *features).string();
      auto it = feature_files.find(feature_path);
      if (it == feature_files.end()) {
        std::unordered_map<std::string, FeatureRow> by_id;
        try {
          for (FeatureRow& r : ReadFeatureRows(feature_path))
            by_id.emplace(r.utterance_id, std::move(r));
        } catch (const Error& e) {
          throw SchemaError("feature file '" + *features + "': " + e.what(),
                            line);
        }
        it = feature_files.emplace(feature_path, std::move(by_id)).first;
      }
      auto f = it->second.find(*id);
      if (f == it->second.end())
        throw SchemaError("no features for '" + *id + "' in '" + *features + "'",
                          line);
      s.features = f->second.features;
      if (!s.audio_seconds && f->second.audio_seconds)
        s.audio_seconds = f->second.audio_seconds;
    }
    samples.push_back(std::move(s));
  });
  result.corpus = Corpus(std::move(samples));
  return result;
}

void Export(const Corpus& corpus, const std::string& path) {
  const fs::path corpus_path(path);
  const std::string feature_name =
      corpus_path.stem().string() + ".features.jsonl";
  const bool any_features =
      std::any_of(corpus.samples().begin(), corpus.samples().end(),
                  [](const Sample& s) { return s.has_features(); });
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  std::ofstream feats;
  if (any_features) {
    const std::string feature_path =
        (corpus_path.parent_path() / feature_name).string();
    feats.open(feature_path);
    if (!feats) throw Error("cannot write '" + feature_path + "'");
  }
  for (const Sample& s : corpus.samples()) {
    nlohmann::ordered_json row;
    row["id"] = s.utterance_id;
    if (s.y_p) {
      row["text_punct"] = text::Detokenize(s.y_p->tokens);
      row["punct_source"] = PunctSourceName(s.y_p_source);
    }
    if (s.original_y_p)
      row["text_punct_original"] = text::Detokenize(s.original_y_p->tokens);
    row["text_norm"] = text::Detokenize(s.y_n.tokens);
    if (s.has_features()) {
      row["features"] = feature_name;
      feats << FeatureRowToJson({s.utterance_id, s.features, s.audio_seconds}).dump()
            << '\n';
    }
    if (s.audio_seconds) row["audio_seconds"] = *s.audio_seconds;
    out << row.dump() << '\n';
  }
  if (!out || (any_features && !feats))
    throw Error("failed writing corpus '" + path + "'");
}

void WriteDroppedLog(const std::string& path,
                     const std::vector<DroppedSample>& dropped) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const DroppedSample& d : dropped) out << DroppedToJson(d).dump() << '\n';
}

AutoPunctuateResult AutoPunctuate(const Corpus& corpus,
                                  const text::Restorer& restorer,
                                  const text::PunctuationConfig& cfg) {
  AutoPunctuateResult result;
  std::vector<Sample> samples;
  samples.reserve(corpus.size());
  for (const Sample& in : corpus.samples()) {
    Sample s = in;
    if (s.y_p && s.y_p_source == PunctSource::kOriginal && !s.original_y_p)
      s.original_y_p = s.y_p;
    try {
      text::Transcript restored = text::Restore(s.y_n, restorer, cfg);
      if (text::Normalize(restored).tokens != s.y_n.tokens)
        throw RestoreError(s.utterance_id,
                           "output does not normalize back to the input");
      s.y_p = std::move(restored);
      s.y_p_source = PunctSource::kAuto;
    } catch (const Error& e) {
      result.failures.push_back({s.utterance_id, e.what()});
      s.y_p.reset();
      s.y_p_source = PunctSource::kAbsent;
    }
    samples.push_back(std::move(s));
  }
  if (!samples.empty() && result.failures.size() == samples.size())
    throw Error("restorer '" + restorer.Name() + "' failed on all " +
                std::to_string(samples.size()) + " utterances; first: " +
                result.failures.front().message);
  result.corpus = Corpus(std::move(samples));
  return result;
}

Corpus SplitProportion(const Corpus& corpus, double p_fraction, uint64_t seed) {
  if (!(p_fraction >= 0.0 && p_fraction <= 1.0))
    throw ConfigError("punctuated fraction must lie in [0, 1], got " +
                      std::to_string(p_fraction));
  const size_t n = corpus.size();
  for (const Sample& s : corpus.samples())
    if (!s.y_p)
      throw Error("sample '" + s.utterance_id +
                  "' has no punctuated transcript to split");
  const size_t keep = static_cast<size_t>(std::llround(p_fraction * n));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> kept(n, false);
  for (size_t i = 0; i < keep; ++i) kept[order[i]] = true;

  std::vector<Sample> samples = corpus.samples();
  for (size_t i = 0; i < n; ++i) {
    if (kept[i]) continue;
    samples[i].y_p.reset();
    samples[i].y_p_source = PunctSource::kAbsent;
  }
  return Corpus(std::move(samples));
}

namespace {

// Template grammar for the toy corpus. Sentence-initial words and names are
// the only cased words, so casing is learnable from position and identity.
class ToyGrammar {
 public:
  explicit ToyGrammar(std::mt19937_64& rng) : rng_(rng) {}

  std::string Sentence() {
    std::string s = Clause(true);
    if (Chance(0.35)) {
      s += Chance(0.5) ? ", and " : ", but ";
      s += Clause(false);
    }
    static const char* kEnds[] = {".", ".", "?", "!"};
    return s + Pick(kEnds);
  }

 private:
  template <size_t N>
  const char* Pick(const char* const (&options)[N]) {
    return options[std::uniform_int_distribution<size_t>(0, N - 1)(rng_)];
  }
  bool Chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string NounPhrase(bool initial) {
    static const char* kNames[] = {"Anna", "Tom", "Max", "Eve"};
    static const char* kDets[] = {"the", "my"};
    static const char* kAdjs[] = {"big", "red", "old", "small"};
    static const char* kNouns[] = {"dog", "cat", "bird", "car", "ball", "tree"};
    if (Chance(0.3)) return Pick(kNames);
    std::string det = Pick(kDets);
    if (initial) det[0] = static_cast<char>(det[0] - 'a' + 'A');
    std::string np = det + " ";
    if (Chance(0.4)) np += std::string(Pick(kAdjs)) + " ";
    return np + Pick(kNouns);
  }

  std::string Clause(bool initial) {
    static const char* kTransitive[] = {"saw", "liked", "found", "took"};
    static const char* kIntransitive[] = {"ran", "sat", "slept"};
    std::string c = NounPhrase(initial) + " ";
    if (Chance(0.3)) return c + Pick(kIntransitive);
    return c + Pick(kTransitive) + " " + NounPhrase(false);
  }

  std::mt19937_64& rng_;
};

}  // namespace

Corpus SynthToyCorpus(const ToyCorpusOptions& options,
                      const text::PunctuationConfig& cfg) {
  if (options.min_chars > options.max_chars || options.max_chars == 0)
    throw ConfigError("toy corpus needs 0 < min_chars <= max_chars");
  if (options.frames_per_char == 0 || !(options.frame_seconds > 0) ||
      !(options.noise_sigma >= 0))
    throw ConfigError("toy corpus needs frames_per_char >= 1, frame_seconds > 0 "
                      "and noise_sigma >= 0");
  const transducer::CharVocabulary vocab =
      transducer::CharVocabulary::Default(cfg);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, options.noise_sigma);
  ToyGrammar grammar(rng);

  std::vector<Sample> samples;
  samples.reserve(options.n_samples);
  const int width = static_cast<int>(std::to_string(options.n_samples).size());
  for (size_t i = 0; i < options.n_samples; ++i) {
    std::string sentence;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 10000)
        throw ConfigError("toy grammar cannot produce sentences of " +
                          std::to_string(options.min_chars) + ".." +
                          std::to_string(options.max_chars) + " characters");
      sentence = grammar.Sentence();
      if (sentence.size() >= options.min_chars &&
          sentence.size() <= options.max_chars)
        break;
    }
    std::string id = std::to_string(i);
    id = options.id_prefix + "-" + std::string(width - id.size(), '0') + id;

    Sample s;
    s.utterance_id = id;
    const std::vector<int> chars = vocab.Encode(sentence);
    const size_t frames = chars.size() * options.frames_per_char;
    s.audio_seconds = frames * options.frame_seconds;
    s.y_p = text::Transcript{id, text::Tokenize(sentence, cfg), s.audio_seconds};
    s.y_p_source = PunctSource::kOriginal;
    s.y_n = text::Normalize(*s.y_p);
    s.features.frames.resize(static_cast<Eigen::Index>(frames),
                             static_cast<Eigen::Index>(vocab.size()));
    for (Eigen::Index t = 0; t < s.features.frames.rows(); ++t)
      for (Eigen::Index a = 0; a < s.features.frames.cols(); ++a)
        s.features.frames(t, a) = noise(rng);
    for (size_t c = 0; c < chars.size(); ++c)
      for (size_t r = 0; r < options.frames_per_char; ++r)
        s.features.frames(
            static_cast<Eigen::Index>(c * options.frames_per_char + r),
            chars[c]) += 1.0;
    samples.push_back(std::move(s));
  }
  return Corpus(std::move(samples));
}

transducer::ModelConfig ToyModelConfig(size_t vocab_size, size_t input_dim,
                                       transducer::Architecture arch) {
  transducer::ModelConfig c;
  c.vocab_size = vocab_size;
  c.input_dim = input_dim;
  c.token_embed_dim = 16;
  c.mode_embed_dim = 8;
  c.predictor_context = 2;
  c.predictor_hidden = 48;
  c.encoder_hidden = 48;
  c.joiner_hidden = 48;
  c.architecture = arch;
  return c;
}

std::vector<transducer::TrainingExample> ToTrainingExamples(
    const Corpus& corpus, const transducer::CharVocabulary& vocab) {
  std::vector<transducer::TrainingExample> out;
  out.reserve(corpus.size());
  for (const Sample& s : corpus.samples()) {
    if (!s.has_features())
      throw Error("sample '" + s.utterance_id + "' has no features");
    transducer::TrainingExample ex;
    ex.utterance_id = s.utterance_id;
    ex.features = s.features;
    ex.y_n = {vocab.Encode(text::Detokenize(s.y_n.tokens)),
              transducer::ModeId::kNormalized};
    if (s.y_p)
      ex.y_p = transducer::LabelSequence{
          vocab.Encode(text::Detokenize(s.y_p->tokens)),
          transducer::ModeId::kPunctuated};
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace pcasr::pipeline
