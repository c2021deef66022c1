// tests/unit/pipeline_test.cc

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

#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "pcasr/error.h"
#include "pcasr/pipeline/batching.h"
#include "pcasr/pipeline/corpus.h"

namespace pcasr::pipeline {
namespace {

namespace fs = std::filesystem;

const text::PunctuationConfig& Cfg() {
  static const text::PunctuationConfig cfg = text::PunctuationConfig::Default();
  return cfg;
}

std::string TempPath(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "pipeline_test";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string WriteFile(const std::string& name, const std::string& body) {
  const std::string path = TempPath(name);
  std::ofstream(path) << body;
  return path;
}

void ExpectSameSample(const Sample& a, const Sample& b) {
  EXPECT_EQ(a.utterance_id, b.utterance_id);
  EXPECT_EQ(a.y_n.tokens, b.y_n.tokens);
  EXPECT_EQ(a.y_p.has_value(), b.y_p.has_value());
  if (a.y_p && b.y_p) EXPECT_EQ(a.y_p->tokens, b.y_p->tokens);
  EXPECT_EQ(a.y_p_source, b.y_p_source);
  EXPECT_EQ(a.original_y_p.has_value(), b.original_y_p.has_value());
  if (a.original_y_p && b.original_y_p)
    EXPECT_EQ(a.original_y_p->tokens, b.original_y_p->tokens);
  EXPECT_EQ(a.audio_seconds, b.audio_seconds);
  EXPECT_TRUE(a.features.frames == b.features.frames) << a.utterance_id;
}

TEST(IngestTest, ThreeValidRows) {
  const std::string path = WriteFile(
      "three.jsonl",
      "{\"id\":\"a\",\"text_punct\":\"Go now!\",\"text_norm\":\"go now\"}\n"
      "{\"id\":\"b\",\"text_norm\":\"i'm sam\",\"audio_seconds\":1.5}\n"
      "\n"
      "{\"id\":\"c\",\"text_punct\":\"Hello, world.\"}\n");
  const IngestResult r = Ingest(path, Cfg());
  ASSERT_EQ(r.corpus.size(), 3u);
  EXPECT_TRUE(r.dropped.empty());
  const auto& s = r.corpus.samples();
  EXPECT_EQ(s[0].y_p_source, PunctSource::kOriginal);
  EXPECT_EQ(s[1].y_p_source, PunctSource::kAbsent);
  EXPECT_EQ(s[1].audio_seconds, 1.5);
  EXPECT_EQ(text::Detokenize(s[2].y_n.tokens), "hello world");
  EXPECT_DOUBLE_EQ(r.corpus.PunctuationFraction(), 2.0 / 3.0);
}

TEST(IngestTest, DropsUppercaseHeadings) {
  const std::string path = WriteFile(
      "chapter.jsonl",
      "{\"id\":\"h\",\"text_punct\":\"CHAPTER ONE\"}\n"
      "{\"id\":\"k\",\"text_punct\":\"Chapter one.\"}\n");
  const IngestResult r = Ingest(path, Cfg());
  ASSERT_EQ(r.corpus.size(), 1u);
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].utterance_id, "h");
  EXPECT_EQ(r.dropped[0].line, 1u);
  EXPECT_EQ(DroppedToJson(r.dropped[0])["id"], "h");
}

TEST(IngestTest, DerivedNormalizedTextIsConsistent) {
  const std::string path =
      WriteFile("derive.jsonl", "{\"id\":\"x\",\"text_punct\":\"I'm Sam.\"}\n");
  const IngestResult r = Ingest(path, Cfg());
  const Sample& s = r.corpus.samples()[0];
  EXPECT_EQ(text::Detokenize(s.y_n.tokens), "i'm sam");
  EXPECT_EQ(text::Normalize(*s.y_p).tokens, s.y_n.tokens);
}

TEST(IngestTest, InconsistentRowsAreDropped) {
  const std::string path = WriteFile(
      "inconsistent.jsonl",
      "{\"id\":\"a\",\"text_punct\":\"Go now!\",\"text_norm\":\"go later\"}\n"
      "{\"id\":\"b\",\"text_norm\":\"Go now\"}\n");
  const IngestResult r = Ingest(path, Cfg());
  EXPECT_EQ(r.corpus.size(), 0u);
  EXPECT_EQ(r.dropped.size(), 2u);
}

void ExpectSchemaErrorAtLine(const std::string& body, size_t line) {
  const std::string path = WriteFile("bad.jsonl", body);
  try {
    Ingest(path, Cfg());
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

TEST(IngestTest, SchemaErrorsCarryLineNumbers) {
  const std::string ok = "{\"id\":\"a\",\"text_norm\":\"go\"}\n";
  ExpectSchemaErrorAtLine(ok + "{\"id\":\"b\"}\n", 2);
  ExpectSchemaErrorAtLine(ok + ok, 2);
  ExpectSchemaErrorAtLine(ok + "\n{\"id\":\"b\",\"text_norm\":\"x\",\"bogus\":1}\n", 3);
  ExpectSchemaErrorAtLine("not json\n", 1);
  ExpectSchemaErrorAtLine("{\"text_norm\":\"x\"}\n", 1);
  ExpectSchemaErrorAtLine("{\"id\":\"a\",\"text_norm\":\"go\",\"audio_seconds\":-1}\n", 1);
  ExpectSchemaErrorAtLine("{\"id\":\"a\",\"text_norm\":\"go\",\"features\":\"none.jsonl\"}\n", 1);
}

TEST(IngestTest, DuplicateIdCitesFirstLine) {
  const std::string path = WriteFile(
      "dup.jsonl",
      "{\"id\":\"a\",\"text_norm\":\"go\"}\n{\"id\":\"b\",\"text_norm\":\"go\"}\n"
      "{\"id\":\"a\",\"text_norm\":\"stop\"}\n");
  try {
    Ingest(path, Cfg());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(IngestTest, FeatureFilesResolveRelativeToCorpus) {
  WriteFile("feats.jsonl",
            "{\"id\":\"a\",\"frames\":[[1,0],[0,1]],\"audio_seconds\":0.02}\n");
  const std::string path = WriteFile(
      "with_feats.jsonl",
      "{\"id\":\"a\",\"text_norm\":\"go\",\"features\":\"feats.jsonl\"}\n");
  const IngestResult r = Ingest(path, Cfg());
  const Sample& s = r.corpus.samples()[0];
  ASSERT_TRUE(s.has_features());
  EXPECT_EQ(s.features.length(), 2u);
  EXPECT_EQ(s.features.frames(1, 1), 1.0);
  EXPECT_EQ(s.audio_seconds, 0.02);
}

TEST(ExportTest, RoundTrip) {
  ToyCorpusOptions o;
  o.n_samples = 12;
  o.seed = 4;
  const Corpus synth = SynthToyCorpus(o);
  const AutoPunctuateResult restored =
      AutoPunctuate(SplitProportion(synth, 0.5, 2), text::RuleRestorer(), Cfg());
  for (const Corpus* c : {&synth, &restored.corpus}) {
    const std::string path = TempPath("export.jsonl");
    Export(*c, path);
    const IngestResult back = Ingest(path, Cfg());
    EXPECT_TRUE(back.dropped.empty());
    ASSERT_EQ(back.corpus.size(), c->size());
    for (size_t i = 0; i < c->size(); ++i)
      ExpectSameSample(back.corpus.samples()[i], c->samples()[i]);
  }
}

Corpus SmallCorpus() {
  std::vector<Sample> samples;
  for (const char* text : {"Go now!", "I'm Sam.", "Hello, world."}) {
    Sample s;
    s.utterance_id = std::string("u") + std::to_string(samples.size());
    s.y_p = text::Transcript{s.utterance_id, text::Tokenize(text, Cfg()), {}};
    s.y_p_source = PunctSource::kOriginal;
    s.y_n = text::Normalize(*s.y_p);
    samples.push_back(std::move(s));
  }
  return Corpus(std::move(samples));
}

TEST(CorpusTest, Invariants) {
  EXPECT_EQ(Corpus().PunctuationFraction(), 0.0);
  std::vector<Sample> dup = SmallCorpus().samples();
  dup[1].utterance_id = dup[0].utterance_id;
  EXPECT_THROW(Corpus{dup}, Error);
  std::vector<Sample> bad = SmallCorpus().samples();
  bad[0].y_p_source = PunctSource::kAbsent;
  EXPECT_THROW(Corpus{bad}, Error);
}

TEST(AutoPunctuateTest, IdentityRestorer) {
  const Corpus c = SmallCorpus();
  const AutoPunctuateResult r = AutoPunctuate(c, text::IdentityRestorer(), Cfg());
  EXPECT_TRUE(r.failures.empty());
  for (size_t i = 0; i < c.size(); ++i) {
    const Sample& s = r.corpus.samples()[i];
    EXPECT_EQ(s.y_p->tokens, s.y_n.tokens);
    EXPECT_EQ(s.y_p_source, PunctSource::kAuto);
    EXPECT_EQ(s.original_y_p->tokens, c.samples()[i].y_p->tokens);
  }
}

TEST(AutoPunctuateTest, RuleRestorer) {
  Sample s;
  s.utterance_id = "g";
  s.y_n = {"g", text::Tokenize("go now", Cfg()), {}};
  const AutoPunctuateResult r =
      AutoPunctuate(Corpus({s}), text::RuleRestorer(), Cfg());
  EXPECT_EQ(text::Detokenize(r.corpus.samples()[0].y_p->tokens), "Go now.");
  EXPECT_FALSE(r.corpus.samples()[0].original_y_p.has_value());
  const AutoPunctuateResult all =
      AutoPunctuate(SmallCorpus(), text::RuleRestorer(), Cfg());
  for (const Sample& out : all.corpus.samples())
    EXPECT_EQ(text::Normalize(*out.y_p).tokens, out.y_n.tokens);
}

class PickyRestorer : public text::Restorer {
 public:
  std::string Restore(std::string_view in) const override {
    if (in.find("sam") != std::string_view::npos) throw std::runtime_error("no");
    if (in.find("world") != std::string_view::npos) return "Hello there.";
    return std::string(in);
  }
  std::string Name() const override { return "picky"; }
};

TEST(AutoPunctuateTest, FailuresAreCollected) {
  const AutoPunctuateResult r = AutoPunctuate(SmallCorpus(), PickyRestorer(), Cfg());
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].utterance_id, "u1");
  EXPECT_EQ(r.failures[1].utterance_id, "u2");
  EXPECT_EQ(r.corpus.size(), 3u);
  EXPECT_EQ(r.corpus.samples()[0].y_p_source, PunctSource::kAuto);
  EXPECT_EQ(r.corpus.samples()[1].y_p_source, PunctSource::kAbsent);
  EXPECT_EQ(r.corpus.samples()[2].y_p_source, PunctSource::kAbsent);
}

class BrokenRestorer : public text::Restorer {
 public:
  std::string Restore(std::string_view) const override {
    throw std::runtime_error("down");
  }
  std::string Name() const override { return "broken"; }
};

TEST(AutoPunctuateTest, AllFailingIsFatal) {
  EXPECT_THROW(AutoPunctuate(SmallCorpus(), BrokenRestorer(), Cfg()), Error);
}

Corpus Toy(size_t n, uint64_t seed = 1) {
  ToyCorpusOptions o;
  o.n_samples = n;
  o.seed = seed;
  return SynthToyCorpus(o);
}

TEST(SplitTest, FivePercentOfHundred) {
  const Corpus c = SplitProportion(Toy(100), 0.05, 42);
  EXPECT_EQ(c.PunctuatedCount(), 5u);
  EXPECT_EQ(c.PunctuationFraction(), 0.05);
}

TEST(SplitTest, EndpointsAndDeterminism) {
  const Corpus full = Toy(40);
  const Corpus same = SplitProportion(full, 1.0, 3);
  for (size_t i = 0; i < full.size(); ++i)
    ExpectSameSample(same.samples()[i], full.samples()[i]);
  EXPECT_EQ(SplitProportion(full, 0.0, 3).PunctuatedCount(), 0u);
  const Corpus a = SplitProportion(full, 0.3, 9), b = SplitProportion(full, 0.3, 9);
  for (size_t i = 0; i < full.size(); ++i)
    EXPECT_EQ(a.samples()[i].y_p.has_value(), b.samples()[i].y_p.has_value());
  EXPECT_THROW(SplitProportion(full, -0.1, 1), ConfigError);
  EXPECT_THROW(SplitProportion(full, 1.1, 1), ConfigError);
  EXPECT_THROW(SplitProportion(a, 0.5, 1), Error);
}

TEST(SplitTest, CountAndStrippingInvariance) {
  const Corpus full = Toy(37, 5);
  for (double p : {0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 0.7, 0.99, 1.0}) {
    const Corpus c = SplitProportion(full, p, 11);
    const double kept = std::round(p * 37.0);
    EXPECT_EQ(c.PunctuationFraction(), kept / 37.0) << p;
    for (size_t i = 0; i < full.size(); ++i) {
      const Sample& s = c.samples()[i];
      const Sample& o = full.samples()[i];
      EXPECT_EQ(s.utterance_id, o.utterance_id);
      EXPECT_EQ(s.y_n, o.y_n);
      EXPECT_TRUE(s.features.frames == o.features.frames);
      if (s.y_p) {
        EXPECT_EQ(*s.y_p, *o.y_p);
        EXPECT_EQ(s.y_p_source, o.y_p_source);
      } else {
        EXPECT_EQ(s.y_p_source, PunctSource::kAbsent);
      }
    }
  }
}

TEST(SynthTest, DeterministicAndConsistent) {
  const Corpus a = Toy(50, 7), b = Toy(50, 7);
  ASSERT_EQ(a.size(), 50u);
  EXPECT_EQ(a.PunctuationFraction(), 1.0);
  const auto vocab = transducer::CharVocabulary::Default(Cfg());
  for (size_t i = 0; i < a.size(); ++i) {
    ExpectSameSample(a.samples()[i], b.samples()[i]);
    const Sample& s = a.samples()[i];
    EXPECT_EQ(text::Normalize(*s.y_p).tokens, s.y_n.tokens);
    const std::string text = text::Detokenize(s.y_p->tokens);
    EXPECT_GE(text.size(), 10u);
    EXPECT_LE(text.size(), 40u);
    EXPECT_EQ(s.features.length(), 2 * text.size());
    EXPECT_EQ(s.features.dim(), vocab.size());
    EXPECT_DOUBLE_EQ(*s.audio_seconds, 0.01 * s.features.length());
  }
  const Corpus c = Toy(50, 8);
  bool differs = false;
  for (size_t i = 0; i < c.size(); ++i)
    differs |= !(c.samples()[i].y_p == a.samples()[i].y_p);
  EXPECT_TRUE(differs);
}

TEST(SynthTest, FeaturesEncodeCharacters) {
  ToyCorpusOptions o;
  o.n_samples = 5;
  o.noise_sigma = 0.0;
  const Corpus c = SynthToyCorpus(o);
  const auto vocab = transducer::CharVocabulary::Default(Cfg());
  for (const Sample& s : c.samples()) {
    const std::vector<int> ids = vocab.Encode(text::Detokenize(s.y_p->tokens));
    for (size_t k = 0; k < ids.size(); ++k)
      for (size_t r : {2 * k, 2 * k + 1}) {
        EXPECT_EQ(s.features.frames.row(static_cast<Eigen::Index>(r)).sum(), 1.0);
        EXPECT_EQ(s.features.frames(static_cast<Eigen::Index>(r), ids[k]), 1.0);
      }
  }
}

TEST(SynthTest, ImpossibleLengthsAreRejected) {
  ToyCorpusOptions o;
  o.min_chars = 2;
  o.max_chars = 3;
  EXPECT_THROW(SynthToyCorpus(o), ConfigError);
}

TEST(ToyModelTest, TrainingExamples) {
  const Corpus c = SplitProportion(Toy(6), 0.5, 1);
  const auto vocab = transducer::CharVocabulary::Default(Cfg());
  const auto examples = ToTrainingExamples(c, vocab);
  ASSERT_EQ(examples.size(), 6u);
  for (size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(examples[i].y_n.tokens, vocab.Encode(text::Detokenize(c.samples()[i].y_n.tokens)));
    EXPECT_EQ(examples[i].y_p.has_value(), c.samples()[i].y_p.has_value());
  }
  EXPECT_NO_THROW(ToyModelConfig(vocab.size(), vocab.size(),
                                 transducer::Architecture::kConditionedPredictor)
                      .Validate());
  EXPECT_THROW(ToTrainingExamples(SmallCorpus(), vocab), Error);
}

void CheckPartition(const Batches& batches, size_t n, size_t batch_size) {
  std::vector<int> seen(n, 0);
  for (const auto& b : batches) {
    EXPECT_LE(b.size(), batch_size);
    EXPECT_GE(b.size(), 1u);
    for (size_t i : b) ++seen[i];
  }
  for (int v : seen) EXPECT_EQ(v, 1);
}

TEST(BatchingTest, ShuffledIsPartition) {
  std::mt19937_64 rng(1);
  for (size_t n : {1, 7, 8, 25}) CheckPartition(ShuffledBatches(n, 8, rng), n, 8);
  EXPECT_THROW(ShuffledBatches(3, 0, rng), Error);
}

TEST(BatchingTest, StratifiedTracksCorpusFraction) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.5);
  for (double p : {0.05, 0.2, 0.5, 0.9}) {
    for (size_t n : {20, 100, 203}) {
      std::vector<bool> has(n, false);
      const size_t k = static_cast<size_t>(std::llround(p * n));
      for (size_t i = 0; i < k; ++i) has[i] = true;
      std::shuffle(has.begin(), has.end(), rng);
      const Batches batches = StratifiedBatches(has, 8, rng);
      CheckPartition(batches, n, 8);
      const double fraction = static_cast<double>(k) / n;
      for (const auto& b : batches) {
        size_t punct = 0;
        for (size_t i : b) punct += has[i];
        EXPECT_LE(std::abs(static_cast<double>(punct) - fraction * b.size()), 1.0)
            << "p " << p << " n " << n;
      }
    }
  }
}

}  // namespace
}  // namespace pcasr::pipeline
