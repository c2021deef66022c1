// pcasr/pipeline/corpus.h

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

#ifndef PCASR_PIPELINE_CORPUS_H_
#define PCASR_PIPELINE_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcasr/text/text_model.h"
#include "pcasr/transducer/objectives.h"
#include "pcasr/transducer/vocabulary.h"

namespace pcasr::pipeline {

enum class PunctSource { kOriginal, kAuto, kAbsent };

std::string_view PunctSourceName(PunctSource source);

struct Sample {
  std::string utterance_id;
  // Zero rows when the sample has no features.
  transducer::FeatureSequence features;
  text::Transcript y_n;
  std::optional<text::Transcript> y_p;
  PunctSource y_p_source = PunctSource::kAbsent;
  // Human punctuation that an auto-punctuated y_p replaced.
  std::optional<text::Transcript> original_y_p;
  std::optional<double> audio_seconds;

  bool has_features() const { return features.frames.rows() > 0; }
};

class Corpus {
 public:
  Corpus() = default;
  // Throws Error on duplicate ids or a y_p/y_p_source disagreement.
  explicit Corpus(std::vector<Sample> samples);

  const std::vector<Sample>& samples() const { return samples_; }
  size_t size() const { return samples_.size(); }
  size_t PunctuatedCount() const;
  // Samples with y_p over all samples; 0 for an empty corpus.
  double PunctuationFraction() const;

 private:
  std::vector<Sample> samples_;
};

struct DroppedSample {
  std::string utterance_id;
  size_t line = 0;
  std::string reason;
};

nlohmann::json DroppedToJson(const DroppedSample& d);

struct IngestResult {
  Corpus corpus;
  std::vector<DroppedSample> dropped;
};

// Reads corpus JSONL rows
//   {"id", "text_punct"?, "text_norm"?, "features"?, "audio_seconds"?,
//    "punct_source"?, "text_punct_original"?}
// with at least one text field. `features` names a feature JSONL file
// (relative to the corpus file) holding {"id", "frames": [[...]]} rows.
// y_n is derived from text_punct when missing. Fully uppercase sentences
// and rows whose texts disagree under normalization are dropped and
// reported. Throws SchemaError (with line numbers) on malformed rows and
// duplicate ids.
IngestResult Ingest(const std::string& path, const text::PunctuationConfig& cfg);

// Writes `path` plus, when any sample has features, a feature file next to
// it. Ingest(path) reproduces the corpus.
void Export(const Corpus& corpus, const std::string& path);

void WriteDroppedLog(const std::string& path,
                     const std::vector<DroppedSample>& dropped);

// {"id", "frames": [[...]], "audio_seconds"?} rows.
struct FeatureRow {
  std::string utterance_id;
  transducer::FeatureSequence features;
  std::optional<double> audio_seconds;
};
std::vector<FeatureRow> ReadFeatureRows(const std::string& path);
nlohmann::json FeatureRowToJson(const FeatureRow& row);

struct RestoreFailure {
  std::string utterance_id;
  std::string message;
};

struct AutoPunctuateResult {
  Corpus corpus;
  std::vector<RestoreFailure> failures;
};

// Replaces every y_p with restore(y_n) (source kAuto), keeping any original
// y_p in original_y_p. A sample whose restoration fails, or whose output
// does not normalize back to y_n, loses its y_p and is reported; it is an
// error only when every sample fails.
AutoPunctuateResult AutoPunctuate(const Corpus& corpus,
                                  const text::Restorer& restorer,
                                  const text::PunctuationConfig& cfg);

// Keeps y_p on exactly round(p_fraction * N) samples drawn uniformly
// without replacement from `seed` and strips it from the rest. Every sample
// must carry y_p. Throws ConfigError for p outside [0, 1].
Corpus SplitProportion(const Corpus& corpus, double p_fraction, uint64_t seed);

struct ToyCorpusOptions {
  uint64_t seed = 1;
  size_t n_samples = 200;
  // Length bounds of the punctuated text, in characters.
  size_t min_chars = 10;
  size_t max_chars = 40;
  double noise_sigma = 0.1;
  size_t frames_per_char = 2;
  double frame_seconds = 0.01;
  std::string id_prefix = "toy";
};

// Random punctuated sentences from a small template grammar, their
// normalized forms, and features made of one-hot frames (one per vocabulary
// entry of CharVocabulary::Default(cfg)) of the punctuated characters plus
// Gaussian noise.
Corpus SynthToyCorpus(const ToyCorpusOptions& options,
                      const text::PunctuationConfig& cfg =
                          text::PunctuationConfig::Default());

// Desk-scale model sizes used for the toy corpus.
transducer::ModelConfig ToyModelConfig(size_t vocab_size, size_t input_dim,
                                       transducer::Architecture arch);

// Maps texts to character labels. Samples without features are an error.
std::vector<transducer::TrainingExample> ToTrainingExamples(
    const Corpus& corpus, const transducer::CharVocabulary& vocab);

}  // namespace pcasr::pipeline

#endif  // PCASR_PIPELINE_CORPUS_H_
