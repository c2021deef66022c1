// tests/acceptance/acceptance.cc

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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles/oracles.h"
#include "pcasr/cli/cli.h"
#include "pcasr/metrics/metrics.h"
#include "pcasr/pipeline/corpus.h"
#include "pcasr/transducer/decode.h"
#include "pcasr/transducer/objectives.h"
#include "pcasr/transducer/rnnt_loss.h"
#include "pcasr/transducer/trainer.h"

namespace pcasr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using transducer::ModeId;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

std::string Fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

const text::PunctuationConfig& Cfg() {
  static const text::PunctuationConfig cfg = text::PunctuationConfig::Default();
  return cfg;
}

fs::path WorkDir() {
  const fs::path dir = fs::temp_directory_path() / "pcasr_acceptance";
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult Cli(const std::vector<std::string>& args) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = cli::Run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. Alignment counts against exhaustive enumeration.
Outcome AlignmentOracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<size_t> len(0, 12);
  std::uniform_int_distribution<int> sym(0, 3);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> ref(len(rng)), hyp(len(rng));
    for (int& s : ref) s = sym(rng);
    for (int& s : hyp) s = sym(rng);
    const metrics::AlignmentResult r = metrics::Align<int>(ref, hyp);
    const oracle::RefAlignment o = oracle::ExhaustiveAligner(ref, hyp).Run();
    if (r.substitutions != o.substitutions || r.deletions != o.deletions ||
        r.insertions != o.insertions)
      ++mismatches;
  }
  const double t = Seconds(start);
  return {mismatches == 0 && t < 10.0,
          std::to_string(mismatches) + "/1000 mismatches, " + Fmt("%.2f s", t)};
}

// 2. The three hand-derived metric examples.
Outcome WorkedExamples() {
  using metrics::Rational;
  struct Case {
    const char* ref;
    const char* hyp;
    Rational wer, punc, cas, pcwer;
  };
  const Case cases[] = {
      {"Hello, world.", "Hello, world.", {0, 1}, {0, 1}, {0, 1}, {0, 1}},
      {"Hello, world.", "hello world", {0, 2}, {2, 2}, {1, 1}, {3, 4}},
      {"Go now!", "go now", {0, 2}, {1, 1}, {1, 1}, {2, 3}},
  };
  int ok = 0;
  std::string percents;
  for (const Case& c : cases) {
    const metrics::MetricReport r = metrics::ComputeMetrics(c.ref, c.hyp, Cfg());
    ok += r.Wer() == c.wer && r.PuncEr() == c.punc && r.CaseEr() == c.cas &&
          r.PcWer() == c.pcwer;
    percents += " " + r.PcWer()->Percent();
  }
  return {ok == 3, std::to_string(ok) + "/3 exact; PC-WER" + percents};
}

// 3. Without marks or uppercase, PC-WER is WER.
Outcome Degeneracy() {
  const std::vector<std::string> words = {"go", "now", "cat", "sat", "i'm",
                                          "well-known", "a", "mat"};
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<size_t> pick(0, words.size() - 1), len(0, 10);
  int ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::string ref, hyp;
    for (size_t i = len(rng); i > 0; --i) ref += words[pick(rng)] + " ";
    for (size_t i = len(rng) + 1; i > 0; --i) hyp += words[pick(rng)] + " ";
    const metrics::MetricReport r = metrics::ComputeMetrics(ref, hyp, Cfg());
    const auto wer = r.Wer(), pcwer = r.PcWer();
    if (wer.has_value() == pcwer.has_value() &&
        (!wer || (*wer == *pcwer && wer->value() == pcwer->value())))
      ++ok;
  }
  return {ok == 200, std::to_string(ok) + "/200 pairs bit-exact"};
}

transducer::LogitLattice RandomLattice(size_t t, size_t u, size_t v,
                                       std::mt19937_64& rng) {
  std::normal_distribution<double> logit(0.0, 2.0);
  transducer::LogitLattice lattice(t, u + 1, v);
  for (Eigen::Index r = 0; r < lattice.values().rows(); ++r) {
    auto row = lattice.values().row(r);
    for (size_t k = 0; k < v; ++k) row[k] = logit(rng);
    const double max = row.maxCoeff();
    const double lse = max + std::log((row.array() - max).exp().sum());
    row.array() -= lse;
  }
  return lattice;
}

std::vector<int> RandomTarget(size_t u, size_t v, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> sym(1, static_cast<int>(v) - 1);
  std::vector<int> y(u);
  for (int& s : y) s = sym(rng);
  return y;
}

// 4. Transducer loss against the brute-force path sum.
Outcome LossOracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<size_t> frames(1, 4), labels(0, 3), vocab(2, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const size_t t = frames(rng), u = labels(rng), v = vocab(rng);
    const auto l = RandomLattice(t, u, v, rng);
    const auto y = RandomTarget(u, v, rng);
    const double brute = oracle::BruteForceTransducerLoss(
        t, y, 0, [&](size_t ti, size_t ui, int k) { return l.at(ti, ui, k); });
    worst = std::max(worst, std::abs(transducer::RnntLoss(l, y) - brute));
  }
  const double secs = Seconds(start);
  return {worst <= 1e-8 && secs < 30.0,
          "max |diff| " + Fmt("%.3g", worst) + ", " + Fmt("%.2f s", secs)};
}

// 5. Loss gradient against central differences.
Outcome GradientCheck() {
  std::mt19937_64 rng(1005);
  std::uniform_int_distribution<size_t> frames(1, 4), labels(0, 3), vocab(2, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t t = frames(rng), u = labels(rng), v = vocab(rng);
    const auto l = RandomLattice(t, u, v, rng);
    const auto y = RandomTarget(u, v, rng);
    const auto g = transducer::RnntLossGrad(l, y, 0, transducer::LatticeCheck::kNone);
    const auto& values = l.values();
    const std::vector<double> x(values.data(), values.data() + values.size());
    const std::vector<double> fd = oracle::CentralDifferences(
        x,
        [&](const std::vector<double>& p) {
          transducer::LogitLattice q = l;
          std::copy(p.begin(), p.end(), q.values().data());
          return transducer::RnntLoss(q, y, 0, transducer::LatticeCheck::kNone);
        },
        1e-5);
    for (size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst,
                       oracle::RelativeError(g.grad.values().data()[i], fd[i]));
  }
  return {worst < 1e-4, "max relative error " + Fmt("%.3g", worst)};
}

std::vector<transducer::TrainingExample> ToyExamples(size_t n, uint64_t seed) {
  pipeline::ToyCorpusOptions o;
  o.n_samples = n;
  o.seed = seed;
  o.max_chars = 30;
  const auto vocab = transducer::CharVocabulary::Default(Cfg());
  return pipeline::ToTrainingExamples(pipeline::SynthToyCorpus(o, Cfg()), vocab);
}

transducer::ModelConfig ToyConfig(transducer::Architecture arch) {
  const size_t v = transducer::CharVocabulary::Default(Cfg()).size();
  return pipeline::ToyModelConfig(v, v, arch);
}

// 6. Conditioned objective endpoints on fully labeled batches.
Outcome ObjectiveEndpoints() {
  const auto batch = ToyExamples(8, 1006);
  const transducer::TransducerModel m(
      ToyConfig(transducer::Architecture::kConditionedPredictor), 1006);
  double sum_n = 0.0, sum_p = 0.0;
  for (const auto& ex : batch) {
    sum_n += transducer::SequenceLoss(m, ex.features, ex.y_n);
    sum_p += transducer::SequenceLoss(m, ex.features, *ex.y_p);
  }
  const double mean_n = sum_n / batch.size(), mean_p = sum_p / batch.size();
  // Sum of both terms per sample, averaged: the two-output objective run
  // through the single shared decoder.
  const double two_output = mean_n + mean_p;
  const bool a1 = transducer::LossConditioned(m, batch, transducer::LossWeights(1.0)) == mean_p;
  const bool a0 = transducer::LossConditioned(m, batch, transducer::LossWeights(0.0)) == mean_n;
  const bool half =
      transducer::LossConditioned(m, batch, transducer::LossWeights(0.5)) == 0.5 * two_output;
  return {a1 && a0 && half, std::string("alpha=1 ") + (a1 ? "exact" : "differs") +
                                ", alpha=0 " + (a0 ? "exact" : "differs") +
                                ", alpha=0.5 " + (half ? "exact" : "differs")};
}

struct ToyRun {
  transducer::TransducerModel model;
  std::vector<transducer::TrainingExample> examples;  // as trained on
  std::vector<std::vector<int>> full_punct;           // before splitting
  size_t epochs = 0;
  double seconds = 0.0;
};

ToyRun TrainToy(size_t n, double p, size_t epochs, double lr) {
  const auto start = std::chrono::steady_clock::now();
  pipeline::ToyCorpusOptions o;
  o.n_samples = n;
  o.seed = 7;
  o.max_chars = 30;
  const pipeline::Corpus full = pipeline::SynthToyCorpus(o, Cfg());
  const pipeline::Corpus split = pipeline::SplitProportion(full, p, 11);
  const auto vocab = transducer::CharVocabulary::Default(Cfg());
  auto examples = pipeline::ToTrainingExamples(split, vocab);
  transducer::TrainerOptions t;
  t.epochs = epochs;
  t.batch_size = 8;
  t.learning_rate = lr;
  t.momentum = 0.9;
  t.clip_norm = 5.0;
  const transducer::TransducerModel init(
      ToyConfig(transducer::Architecture::kConditionedPredictor), 3);
  auto result = transducer::Train(init, examples, t, transducer::LossWeights(0.5), 5);
  std::vector<std::vector<int>> punct;
  for (const auto& s : full.samples())
    punct.push_back(vocab.Encode(text::Detokenize(s.y_p->tokens)));
  return {std::move(result.model), std::move(examples), std::move(punct), epochs,
          Seconds(start)};
}

struct ExactMatch {
  double norm = 0.0, punct = 0.0;
};

ExactMatch Evaluate(const ToyRun& run) {
  size_t n_ok = 0, p_ok = 0;
  for (size_t i = 0; i < run.examples.size(); ++i) {
    const auto& ex = run.examples[i];
    n_ok += transducer::GreedyDecode(run.model, ex.features, ModeId::kNormalized)
                .tokens == ex.y_n.tokens;
    p_ok += transducer::GreedyDecode(run.model, ex.features, ModeId::kPunctuated)
                .tokens == run.full_punct[i];
  }
  const double n = static_cast<double>(run.examples.size());
  return {100.0 * n_ok / n, 100.0 * p_ok / n};
}

std::optional<ToyRun> g_full_run;

// 7. Mode conditioning on a fully punctuated toy corpus.
Outcome ModeConditioning() {
  g_full_run = TrainToy(200, 1.0, 60, 0.05);
  const ToyRun& run = *g_full_run;
  const ExactMatch em = Evaluate(run);
  transducer::TransducerModel zeroed = run.model;
  zeroed.weights().mode_embedding.setZero();
  bool collapsed = true;
  for (size_t i = 0; i < 20; ++i) {
    const auto& ex = run.examples[i];
    collapsed &= zeroed.ComputeLattice(ex.features, ex.y_n.tokens, ModeId::kNormalized).values() ==
                 zeroed.ComputeLattice(ex.features, ex.y_n.tokens, ModeId::kPunctuated).values();
  }
  const bool pass = em.norm >= 95.0 && em.punct >= 95.0 && collapsed &&
                    run.epochs <= 200 && run.seconds < 600.0;
  return {pass, "exact match N " + Fmt("%.1f%%", em.norm) + ", P " +
                    Fmt("%.1f%%", em.punct) + ", zeroed mode embedding " +
                    (collapsed ? "collapses modes" : "leaves modes apart") + ", " +
                    std::to_string(run.epochs) + " epochs, " +
                    Fmt("%.0f s", run.seconds)};
}

// Both modes of the criterion 7 model on unseen toy utterances: the
// punctuated output should normalize to the normalized output.
Outcome HeldOutModeAgreement() {
  if (!g_full_run) return {false, "no trained model"};
  const auto held_out = ToyExamples(200, 99);
  const auto vocab = transducer::CharVocabulary::Default(Cfg());
  size_t agree = 0;
  for (const auto& ex : held_out) {
    const std::string n = vocab.Decode(
        transducer::GreedyDecode(g_full_run->model, ex.features, ModeId::kNormalized).tokens);
    const std::string p = vocab.Decode(
        transducer::GreedyDecode(g_full_run->model, ex.features, ModeId::kPunctuated).tokens);
    agree += text::Normalize({"", text::Tokenize(p, Cfg()), {}}).tokens ==
             text::Tokenize(n, Cfg());
  }
  const double rate = 100.0 * agree / held_out.size();
  return {rate >= 90.0, Fmt("%.1f%%", rate) + " of 200 held-out utterances agree"};
}

// 8. Limited punctuated data.
Outcome LimitedPunctuation() {
  const ExactMatch half = Evaluate(TrainToy(2000, 0.5, 15, 0.02));
  const ExactMatch few = Evaluate(TrainToy(2000, 0.05, 15, 0.02));
  const double n_gap = std::abs(half.norm - few.norm);
  const double p_gap = half.punct - few.punct;
  return {n_gap <= 2.0 && p_gap <= 15.0,
          "p=0.5: N " + Fmt("%.2f%%", half.norm) + " P " + Fmt("%.2f%%", half.punct) +
              "; p=0.05: N " + Fmt("%.2f%%", few.norm) + " P " +
              Fmt("%.2f%%", few.punct) + "; N gap " + Fmt("%.2f", n_gap) +
              ", P gap " + Fmt("%.2f", p_gap)};
}

// 9. Two-decoder separation.
Outcome Decoupling() {
  const auto examples = ToyExamples(10, 1009);
  const transducer::TransducerModel m(
      ToyConfig(transducer::Architecture::kTwoDecoder), 1009);
  int identical = 0;
  for (const auto& ex : examples) {
    const transducer::LossTerm n_only[] = {{ModeId::kNormalized, ex.y_n.tokens, 1.0}};
    const transducer::LossTerm both[] = {{ModeId::kNormalized, ex.y_n.tokens, 1.0},
                                         {ModeId::kPunctuated, ex.y_p->tokens, 1.0}};
    transducer::ModelWeights g1 = m.weights().ZerosLike(), g2 = m.weights().ZerosLike();
    transducer::EvaluateTerms(m, ex.features, n_only, &g1);
    transducer::EvaluateTerms(m, ex.features, both, &g2);
    transducer::ModelWeights d1 = g1.ZerosLike(), d2 = g2.ZerosLike();
    d1.decoders[0] = g1.decoders[0];
    d2.decoders[0] = g2.decoders[0];
    identical += d1 == d2;
  }
  return {identical == 10, std::to_string(identical) +
                               "/10 samples with bit-identical decoder-N gradients"};
}

// 10. Matched-pairs test sanity.
Outcome Significance() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int64_t> errs(0, 6);
  std::vector<metrics::MetricReport> base(100);
  for (auto& r : base) {
    r.e_pc = errs(rng);
    r.n_pc = 10;
  }
  const auto same = metrics::MatchedPairsTest(base, base, metrics::MetricKind::kPcWer);
  bool shifted_ok = true;
  std::string detail = "identical p=" + Fmt("%.3g", same.p_value);
  for (int64_t k : {1, 2, 5}) {
    std::vector<metrics::MetricReport> worse = base;
    for (auto& r : worse) r.e_pc += k;
    const auto res = metrics::MatchedPairsTest(worse, base, metrics::MetricKind::kPcWer);
    shifted_ok &= res.p_value < 0.05;
    detail += ", +" + std::to_string(k) + " p=" + Fmt("%.3g", res.p_value);
  }
  return {same.p_value == 1.0 && shifted_ok, detail};
}

// 11. Determinism of train and score through the command line.
Outcome Determinism() {
  const fs::path dir = WorkDir();
  const std::string corpus = (dir / "det.jsonl").string();
  if (Cli({"synth", "--out", corpus, "--n-samples", "24", "--seed", "11"}).code != 0)
    return {false, "synth failed"};
  std::string logs[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path log = dir / ("det" + std::to_string(i) + ".log");
    const CliResult r = Cli({"train", corpus, "--epochs", "3", "--seed", "4",
                             "--p-fraction", "0.5", "--out",
                             (dir / "det.ckpt.json").string(), "--loss-log",
                             log.string()});
    if (r.code != 0) return {false, "train failed: " + r.err};
    logs[i] = ReadAll(log);
  }

  std::ofstream ref(dir / "ref.jsonl"), hyp(dir / "hyp.jsonl");
  pipeline::ToyCorpusOptions o;
  o.n_samples = 60;
  o.seed = 1011;
  const pipeline::Corpus c = pipeline::SynthToyCorpus(o, Cfg());
  for (size_t i = 0; i < c.size(); ++i) {
    const auto& s = c.samples()[i];
    ref << json{{"id", s.utterance_id}, {"text", text::Detokenize(s.y_p->tokens)}}.dump() << '\n';
    hyp << json{{"id", s.utterance_id},
                {"text", text::Detokenize(i % 2 ? s.y_n.tokens : s.y_p->tokens)}}
               .dump()
        << '\n';
  }
  ref.close();
  hyp.close();
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "1", "2", "4"})
    outputs.push_back(Cli({"score", (dir / "ref.jsonl").string(),
                           (dir / "hyp.jsonl").string(), "--per-utt",
                           "--dump-align", "--threads", threads})
                          .out);
  bool score_same = !outputs[0].empty();
  for (const auto& out : outputs) score_same &= out == outputs[0];
  const bool train_same = !logs[0].empty() && logs[0] == logs[1];
  return {train_same && score_same,
          std::string("train loss logs ") + (train_same ? "identical" : "differ") +
              ", score output " + (score_same ? "identical" : "differs") +
              " across runs and 1/2/4 threads"};
}

// 12. Real-time factor.
Outcome RealTimeFactor() {
  const bool exact = metrics::Rtf(4.4, 10.0) == 0.44;
  const fs::path dir = WorkDir();
  const std::string corpus = (dir / "rtf.jsonl").string();
  const std::string ckpt = (dir / "rtf.ckpt.json").string();
  if (Cli({"synth", "--out", corpus, "--n-samples", "6"}).code != 0 ||
      Cli({"train", corpus, "--epochs", "1", "--out", ckpt}).code != 0)
    return {false, "setup failed"};
  const CliResult r = Cli({"rtf-bench", ckpt, (dir / "rtf.features.jsonl").string()});
  if (r.code != 0) return {false, "rtf-bench failed: " + r.err};
  const json j = json::parse(r.out);
  double audio = 0.0, infer = 0.0;
  for (const json& u : j["utterances"]) {
    audio += u["audio_seconds"].get<double>();
    infer += u["inference_seconds"].get<double>();
  }
  const json& total = j["total"];
  const bool aggregate =
      total["audio_seconds"].get<double>() == audio &&
      total["inference_seconds"].get<double>() == infer &&
      total["rtf"].get<double>() == metrics::Rtf(infer, audio);
  return {exact && aggregate,
          "rtf(4.4, 10.0) = " + Fmt("%.17g", metrics::Rtf(4.4, 10.0)) +
              ", aggregate " + (aggregate ? "equals" : "differs from") +
              " total inference / total audio"};
}

}  // namespace
}  // namespace pcasr

int main() {
  using pcasr::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"Criterion 1", pcasr::AlignmentOracle},
      {"Criterion 2", pcasr::WorkedExamples},
      {"Criterion 3", pcasr::Degeneracy},
      {"Criterion 4", pcasr::LossOracle},
      {"Criterion 5", pcasr::GradientCheck},
      {"Criterion 6", pcasr::ObjectiveEndpoints},
      {"Criterion 7", pcasr::ModeConditioning},
      {"Held-out mode agreement", pcasr::HeldOutModeAgreement},
      {"Criterion 8", pcasr::LimitedPunctuation},
      {"Criterion 9", pcasr::Decoupling},
      {"Criterion 10", pcasr::Significance},
      {"Criterion 11", pcasr::Determinism},
      {"Criterion 12", pcasr::RealTimeFactor},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << name << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail
              << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
