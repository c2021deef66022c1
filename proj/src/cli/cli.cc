// src/cli/cli.cc

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

#include "pcasr/cli/cli.h"

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcasr/error.h"
#include "pcasr/metrics/alignment.h"
#include "pcasr/metrics/metrics.h"
#include "pcasr/pipeline/corpus.h"
#include "pcasr/text/text_model.h"
#include "pcasr/transducer/checkpoint.h"
#include "pcasr/transducer/decode.h"
#include "pcasr/transducer/trainer.h"

namespace pcasr::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// rtf-bench input rows without a duration.
class MissingAudioError : public Error {
 public:
  using Error::Error;
};

// Contents of the --config file: {"punctuation": {...}, "model": {...},
// "train": {...}}, every section optional.
struct ToolConfig {
  text::PunctuationConfig punctuation = text::PunctuationConfig::Default();
  json model = json::object();
  json train = json::object();
};

ToolConfig LoadToolConfig(const std::string& path) {
  ToolConfig config;
  if (path.empty()) return config;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_object())
      throw ConfigError("config section '" + key + "' must be an object");
    if (key == "punctuation") {
      config.punctuation = text::PunctuationConfig::FromJson(value);
    } else if (key == "model") {
      config.model = value;
    } else if (key == "train") {
      config.train = value;
    } else {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
  return config;
}

// Training settings; the "train" config section fills them and explicit
// flags override it.
struct TrainSettings {
  std::string arch = "cond";
  double alpha = 0.5;
  std::optional<double> p_fraction;
  uint64_t seed = 1;
  transducer::TrainerOptions trainer;
};

void ApplyTrainSection(const json& j, TrainSettings& s) {
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "arch") s.arch = v.get<std::string>();
      else if (key == "alpha") s.alpha = v.get<double>();
      else if (key == "p_fraction") s.p_fraction = v.get<double>();
      else if (key == "seed") s.seed = v.get<uint64_t>();
      else if (key == "epochs") s.trainer.epochs = v.get<size_t>();
      else if (key == "batch_size") s.trainer.batch_size = v.get<size_t>();
      else if (key == "learning_rate") s.trainer.learning_rate = v.get<double>();
      else if (key == "momentum") s.trainer.momentum = v.get<double>();
      else if (key == "clip_norm") s.trainer.clip_norm = v.get<double>();
      else if (key == "threads") s.trainer.threads = v.get<size_t>();
      else throw ConfigError("unknown train config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("train config key '" + key + "': " + e.what());
    }
  }
}

std::vector<text::Transcript> ReadTranscriptsFrom(
    const std::string& path, std::istream& in,
    const text::PunctuationConfig& cfg) {
  return path == "-" ? text::ReadTranscripts(in, cfg)
                     : text::ReadTranscripts(path, cfg);
}

std::vector<std::string> SplitLines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream stream(s);
  for (std::string line; std::getline(stream, line);) lines.push_back(line);
  return lines;
}

ordered_json AlignmentJson(const metrics::UtteranceScore& score) {
  ordered_json views;
  for (size_t v = 0; v < text::kAllViews.size(); ++v) {
    views[std::string(text::ViewName(text::kAllViews[v]))] =
        SplitLines(metrics::FormatAlignment(score.ref_views[v],
                                            score.hyp_views[v],
                                            score.alignments[v]));
  }
  return views;
}

std::unique_ptr<text::Restorer> MakeRestorer(const std::string& name,
                                             const std::string& command) {
  if (name == "identity") return std::make_unique<text::IdentityRestorer>();
  if (name == "rule") return std::make_unique<text::RuleRestorer>();
  if (command.empty())
    throw ConfigError("the command restorer needs --command");
  return std::make_unique<text::CommandRestorer>(command);
}

ordered_json CorpusSummary(const pipeline::Corpus& corpus) {
  ordered_json j;
  j["samples"] = corpus.size();
  j["punctuated"] = corpus.PunctuatedCount();
  j["punctuation_fraction"] = corpus.PunctuationFraction();
  return j;
}

// Dropped rows go to stderr, and also to `dropped_log` when it is set.
pipeline::Corpus IngestLogged(const std::string& path,
                              const text::PunctuationConfig& cfg,
                              const std::string& dropped_log,
                              std::ostream& err) {
  pipeline::IngestResult r = pipeline::Ingest(path, cfg);
  for (const pipeline::DroppedSample& d : r.dropped)
    err << "dropped " << pipeline::DroppedToJson(d).dump() << '\n';
  if (!dropped_log.empty()) pipeline::WriteDroppedLog(dropped_log, r.dropped);
  return std::move(r.corpus);
}

std::vector<transducer::ModeId> RequestedModes(
    const std::string& mode, const transducer::TransducerModel& model) {
  std::vector<transducer::ModeId> modes;
  if (mode == "both") {
    modes = {transducer::ModeId::kNormalized, transducer::ModeId::kPunctuated};
  } else {
    modes = {*transducer::ParseMode(mode)};
  }
  for (transducer::ModeId m : modes) {
    if (!model.Supports(m))
      throw ConfigError(
          "a " +
          std::string(transducer::ArchitectureName(model.config().architecture)) +
          " model cannot decode in mode '" +
          std::string(transducer::ModeName(m)) + "'");
  }
  return modes;
}

std::string DecodeText(const transducer::TransducerModel& model,
                       const transducer::CharVocabulary& vocab,
                       const transducer::FeatureSequence& x,
                       transducer::ModeId mode,
                       const text::PunctuationConfig& cfg,
                       size_t max_symbols) {
  const transducer::LabelSequence y =
      transducer::GreedyDecode(model, x, mode, max_symbols);
  return text::Detokenize(text::Tokenize(vocab.Decode(y.tokens), cfg));
}

void CheckFeatureDim(const transducer::TransducerModel& model,
                     const pipeline::FeatureRow& row) {
  if (row.features.dim() != model.config().input_dim)
    throw Error("features of '" + row.utterance_id + "' have dimension " +
                std::to_string(row.features.dim()) + ", the model expects " +
                std::to_string(model.config().input_dim));
}

const std::set<std::string> kModes = {"norm", "punct", "both"};

class Tool {
 public:
  Tool(std::istream& in, std::ostream& out, std::ostream& err)
      : in_(in), out_(out), err_(err) {}

  int Run(const std::vector<std::string>& args);

 private:
  void Score();
  void AlignView();
  void NormalizeCmd();
  void RestoreCmd();
  void Split();
  void Synth();
  void TrainCmd();
  void Decode();
  void RtfBench();
  void Significance();

  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  ToolConfig config_;

  std::string config_path_;
  // Positional arguments and flags of the subcommands.
  std::string ref_, hyp_, hyp_b_, input_, checkpoint_, features_, out_path_;
  bool per_utt_ = false, dump_align_ = false, jsonl_ = false,
       corpus_mode_ = false;
  size_t threads_ = 1;
  std::string view_ = "all", restorer_ = "rule", command_, mode_ = "punct",
              metric_ = "pc-wer", loss_log_, dropped_log_;
  double p_fraction_ = 1.0;
  uint64_t seed_ = 1;
  size_t max_symbols_ = transducer::kDefaultMaxSymbolsPerFrame;
  pipeline::ToyCorpusOptions toy_;
  TrainSettings train_;
  CLI::App* train_cmd_ = nullptr;
};

int Tool::Run(const std::vector<std::string>& args) {
  CLI::App app{"Punctuation- and case-aware ASR scoring and toy transducer "
               "training",
               std::string(kToolName)};
  app.fallthrough();
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "Print tool and checkpoint versions");
  app.add_option("--config", config_path_,
                 "JSON with punctuation/model/train sections")
      ->check(CLI::ExistingFile);

  auto* score = app.add_subcommand("score", "Corpus metrics of hyp vs ref");
  score->add_option("ref", ref_, "Reference transcripts JSONL")->required();
  score->add_option("hyp", hyp_, "Hypothesis transcripts JSONL")->required();
  score->add_flag("--per-utt", per_utt_, "Add per-utterance reports");
  score->add_flag("--dump-align", dump_align_,
                  "Add sclite-style alignments of every view");
  score->add_option("--threads", threads_, "Scoring workers")
      ->check(CLI::PositiveNumber);

  auto* align = app.add_subcommand("align-view",
                                   "Print the four view alignments as text");
  align->add_option("ref", ref_, "Reference text")->required();
  align->add_option("hyp", hyp_, "Hypothesis text")->required();
  align->add_flag("--jsonl", jsonl_,
                  "Treat ref and hyp as transcript JSONL files");
  align->add_option("--view", view_, "p-c, p-nc, np-c, np-nc or all")
      ->check(CLI::IsMember({"all", "p-c", "p-nc", "np-c", "np-nc"}));

  auto* normalize = app.add_subcommand(
      "normalize", "Lowercase and strip marks from transcripts JSONL");
  normalize->add_option("input", input_, "Transcripts JSONL ('-' for stdin)")
      ->required();

  auto* restore = app.add_subcommand(
      "restore", "Restore punctuation and case of normalized transcripts");
  restore->add_option("input", input_, "Transcripts JSONL, or a corpus with "
                                       "--corpus")
      ->required();
  restore->add_option("--restorer", restorer_, "identity, rule or command")
      ->check(CLI::IsMember({"identity", "rule", "command"}));
  restore->add_option("--command", command_,
                      "Shell command for the command restorer");
  restore->add_flag("--corpus", corpus_mode_,
                    "Auto-punctuate a corpus JSONL into --out");
  restore->add_option("--out", out_path_, "Output corpus path (--corpus)");
  restore->add_option("--dropped-log", dropped_log_,
                      "JSONL of dropped rows (--corpus)");

  auto* split = app.add_subcommand(
      "split", "Keep punctuated transcripts on a fraction of a corpus");
  split->add_option("corpus", input_, "Corpus JSONL")->required();
  split->add_option("--p-fraction", p_fraction_, "Fraction keeping y_p")
      ->required();
  split->add_option("--seed", seed_, "Sampling seed");
  split->add_option("--out", out_path_, "Output corpus path")->required();
  split->add_option("--dropped-log", dropped_log_, "JSONL of dropped rows");

  auto* synth = app.add_subcommand("synth", "Generate the toy corpus");
  synth->add_option("--out", out_path_, "Output corpus path")->required();
  synth->add_option("--n-samples", toy_.n_samples, "Number of utterances")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", toy_.seed, "Generator seed");
  synth->add_option("--min-chars", toy_.min_chars, "Shortest text");
  synth->add_option("--max-chars", toy_.max_chars, "Longest text");
  synth->add_option("--noise", toy_.noise_sigma, "Feature noise sigma");

  train_cmd_ = app.add_subcommand("train", "Train a toy transducer");
  train_cmd_->add_option("corpus", input_, "Corpus JSONL")->required();
  train_cmd_->add_option("--arch", train_.arch, "punct-only, 2dec or cond")
      ->check(CLI::IsMember({"punct-only", "2dec", "cond"}));
  train_cmd_->add_option("--alpha", train_.alpha, "Punctuated loss weight");
  train_cmd_->add_option("--p-fraction", train_.p_fraction,
                         "Split the corpus first, keeping this fraction of "
                         "punctuated transcripts");
  train_cmd_->add_option("--seed", train_.seed, "Seed of split, init, batches");
  train_cmd_->add_option("--epochs", train_.trainer.epochs, "Epochs");
  train_cmd_->add_option("--lr", train_.trainer.learning_rate, "Learning rate");
  train_cmd_->add_option("--momentum", train_.trainer.momentum, "Momentum");
  train_cmd_->add_option("--batch-size", train_.trainer.batch_size,
                         "Batch size");
  train_cmd_->add_option("--clip-norm", train_.trainer.clip_norm,
                         "Gradient norm clip, 0 disables");
  train_cmd_->add_option("--threads", train_.trainer.threads,
                         "Per-sample gradient workers");
  train_cmd_->add_option("--out", out_path_, "Checkpoint path")->required();
  train_cmd_->add_option("--loss-log", loss_log_, "Per-epoch loss JSONL");
  train_cmd_->add_option("--dropped-log", dropped_log_, "JSONL of dropped rows");

  auto* decode = app.add_subcommand("decode", "Greedy decoding to JSONL");
  decode->add_option("checkpoint", checkpoint_, "Checkpoint JSON")->required();
  decode->add_option("features", features_, "Feature JSONL")->required();
  decode->add_option("--mode", mode_, "norm, punct or both")
      ->check(CLI::IsMember(kModes));
  decode->add_option("--max-symbols", max_symbols_,
                     "Symbols per encoder frame")
      ->check(CLI::PositiveNumber);

  auto* rtf = app.add_subcommand("rtf-bench",
                                 "Sequential single-thread real-time factor");
  rtf->add_option("checkpoint", checkpoint_, "Checkpoint JSON")->required();
  rtf->add_option("features", features_, "Feature JSONL with audio_seconds")
      ->required();
  rtf->add_option("--mode", mode_, "norm or punct")
      ->check(CLI::IsMember({"norm", "punct"}));

  auto* sig = app.add_subcommand(
      "significance", "Matched-pairs test of two systems against a reference");
  sig->add_option("ref", ref_, "Reference transcripts JSONL")->required();
  sig->add_option("hyp_a", hyp_, "System A transcripts JSONL")->required();
  sig->add_option("hyp_b", hyp_b_, "System B transcripts JSONL")->required();
  sig->add_option("--metric", metric_, "wer, puncer, caseer or pc-wer")
      ->check(CLI::IsMember({"wer", "puncer", "caseer", "pc-wer"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out_, err_);
    return code == 0 ? kExitOk : kExitFailure;
  }

  if (version) {
    out_ << kToolName << ' ' << kToolVersion << '\n'
         << "checkpoint " << transducer::kCheckpointFormat << " v"
         << transducer::kCheckpointVersion << '\n';
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    err_ << app.help();
    return kExitFailure;
  }

  try {
    config_ = LoadToolConfig(config_path_);
    const CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "score") Score();
    else if (name == "align-view") AlignView();
    else if (name == "normalize") NormalizeCmd();
    else if (name == "restore") RestoreCmd();
    else if (name == "split") Split();
    else if (name == "synth") Synth();
    else if (name == "train") TrainCmd();
    else if (name == "decode") Decode();
    else if (name == "rtf-bench") RtfBench();
    else if (name == "significance") Significance();
  } catch (const IdMismatchError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitIdMismatch;
  } catch (const MissingAudioError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitIdMismatch;
  } catch (const ConfigError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    err_ << "error: " << e.what() << "\nlast finite losses:";
    for (double l : e.last_finite_losses()) err_ << ' ' << json(l).dump();
    err_ << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

void Tool::Score() {
  const auto& cfg = config_.punctuation;
  const auto refs = ReadTranscriptsFrom(ref_, in_, cfg);
  const auto hyps = ReadTranscriptsFrom(hyp_, in_, cfg);
  const auto pairs = metrics::PairById(refs, hyps);
  const metrics::CorpusScore score = metrics::CorpusMetrics(pairs, threads_);

  ordered_json j;
  j["n_utterances"] = pairs.size();
  j["corpus"] = metrics::ReportToJson(score.total);
  if (per_utt_ || dump_align_) {
    ordered_json utts = ordered_json::array();
    for (const metrics::UtteranceScore& u : score.utterances) {
      ordered_json row;
      row["id"] = u.utterance_id;
      if (per_utt_) row["report"] = metrics::ReportToJson(u.report);
      if (dump_align_) row["alignment"] = AlignmentJson(u);
      utts.push_back(std::move(row));
    }
    j["utterances"] = std::move(utts);
  }
  out_ << j.dump(2) << '\n';
}

void Tool::AlignView() {
  const auto& cfg = config_.punctuation;
  std::vector<metrics::TranscriptPair> pairs;
  if (jsonl_) {
    pairs = metrics::PairById(ReadTranscriptsFrom(ref_, in_, cfg),
                              ReadTranscriptsFrom(hyp_, in_, cfg));
  } else {
    pairs.push_back({{"", text::Tokenize(ref_, cfg), std::nullopt},
                     {"", text::Tokenize(hyp_, cfg), std::nullopt}});
  }
  for (const metrics::TranscriptPair& p : pairs) {
    const metrics::UtteranceScore s = metrics::ScoreUtterance(p.ref, p.hyp);
    if (jsonl_) out_ << "id: " << p.ref.utterance_id << '\n';
    for (size_t v = 0; v < text::kAllViews.size(); ++v) {
      const std::string_view name = text::ViewName(text::kAllViews[v]);
      if (view_ != "all" && view_ != name) continue;
      const metrics::AlignmentResult& a = s.alignments[v];
      out_ << '[' << name << "] N=" << s.ref_views[v].size()
           << " S=" << a.substitutions << " D=" << a.deletions
           << " I=" << a.insertions << '\n'
           << metrics::FormatAlignment(s.ref_views[v], s.hyp_views[v], a)
           << '\n';
    }
  }
}

void Tool::NormalizeCmd() {
  for (const text::Transcript& t :
       ReadTranscriptsFrom(input_, in_, config_.punctuation))
    out_ << text::TranscriptToJson(text::Normalize(t)).dump() << '\n';
}

void Tool::RestoreCmd() {
  const auto& cfg = config_.punctuation;
  const auto restorer = MakeRestorer(restorer_, command_);
  if (corpus_mode_) {
    if (out_path_.empty()) throw ConfigError("--corpus needs --out");
    pipeline::AutoPunctuateResult r = pipeline::AutoPunctuate(
        IngestLogged(input_, cfg, dropped_log_, err_), *restorer, cfg);
    pipeline::Export(r.corpus, out_path_);
    ordered_json summary = CorpusSummary(r.corpus);
    summary["failures"] = ordered_json::array();
    for (const auto& f : r.failures)
      summary["failures"].push_back({{"id", f.utterance_id},
                                     {"message", f.message}});
    out_ << summary.dump(2) << '\n';
    return;
  }
  const auto transcripts = ReadTranscriptsFrom(input_, in_, cfg);
  size_t failures = 0;
  for (const text::Transcript& t : transcripts) {
    try {
      out_ << text::TranscriptToJson(text::Restore(t, *restorer, cfg)).dump()
           << '\n';
    } catch (const RestoreError& e) {
      ++failures;
      err_ << "warning: " << e.what() << '\n';
    }
  }
  if (!transcripts.empty() && failures == transcripts.size())
    throw Error("restorer failed on every utterance");
}

void Tool::Split() {
  const pipeline::Corpus corpus = pipeline::SplitProportion(
      IngestLogged(input_, config_.punctuation, dropped_log_, err_), p_fraction_, seed_);
  pipeline::Export(corpus, out_path_);
  out_ << CorpusSummary(corpus).dump(2) << '\n';
}

void Tool::Synth() {
  const pipeline::Corpus corpus =
      pipeline::SynthToyCorpus(toy_, config_.punctuation);
  pipeline::Export(corpus, out_path_);
  out_ << CorpusSummary(corpus).dump(2) << '\n';
}

void Tool::TrainCmd() {
  const auto& cfg = config_.punctuation;
  // Config file values first, then whatever flags were given on top.
  TrainSettings settings;
  ApplyTrainSection(config_.train, settings);
  auto given = [&](const char* flag) { return train_cmd_->count(flag) > 0; };
  if (given("--arch")) settings.arch = train_.arch;
  if (given("--alpha")) settings.alpha = train_.alpha;
  if (given("--p-fraction")) settings.p_fraction = train_.p_fraction;
  if (given("--seed")) settings.seed = train_.seed;
  if (given("--epochs")) settings.trainer.epochs = train_.trainer.epochs;
  if (given("--lr")) settings.trainer.learning_rate = train_.trainer.learning_rate;
  if (given("--momentum")) settings.trainer.momentum = train_.trainer.momentum;
  if (given("--batch-size")) settings.trainer.batch_size = train_.trainer.batch_size;
  if (given("--clip-norm")) settings.trainer.clip_norm = train_.trainer.clip_norm;
  if (given("--threads")) settings.trainer.threads = train_.trainer.threads;

  const auto arch = transducer::ParseArchitecture(settings.arch);
  if (!arch) throw ConfigError("unknown architecture '" + settings.arch + "'");
  const transducer::LossWeights weights(settings.alpha);

  pipeline::Corpus corpus = IngestLogged(input_, cfg, dropped_log_, err_);
  if (settings.p_fraction)
    corpus = pipeline::SplitProportion(corpus, *settings.p_fraction,
                                       settings.seed);
  if (corpus.size() == 0) throw Error("corpus '" + input_ + "' is empty");
  const auto vocab = transducer::CharVocabulary::Default(cfg);
  const auto examples = pipeline::ToTrainingExamples(corpus, vocab);
  const size_t input_dim = examples.front().features.dim();
  for (const auto& ex : examples)
    if (ex.features.dim() != input_dim)
      throw Error("features of '" + ex.utterance_id +
                  "' differ in dimension from the first sample");

  transducer::ModelConfig model_config = transducer::ModelConfig::FromJson(
      config_.model, pipeline::ToyModelConfig(vocab.size(), input_dim, *arch));
  if (given("--arch") || !config_.model.contains("architecture"))
    model_config.architecture = *arch;
  if (model_config.vocab_size != vocab.size() ||
      model_config.input_dim != input_dim)
    throw ConfigError("model vocab_size/input_dim must match the vocabulary (" +
                      std::to_string(vocab.size()) + ") and features (" +
                      std::to_string(input_dim) + ")");
  model_config.Validate();

  std::ofstream loss_log;
  if (!loss_log_.empty()) {
    loss_log.open(loss_log_);
    if (!loss_log) throw Error("cannot write '" + loss_log_ + "'");
  }
  err_ << "training " << transducer::ArchitectureName(model_config.architecture)
       << " on " << corpus.size() << " samples (" << corpus.PunctuatedCount()
       << " punctuated)\n";
  transducer::TransducerModel model(model_config, settings.seed + 1);
  transducer::TrainingResult result = transducer::Train(
      std::move(model), examples, settings.trainer, weights, settings.seed + 2,
      [&](const transducer::EpochStats& s) {
        const std::string line = transducer::EpochStatsToJson(s).dump();
        if (loss_log) loss_log << line << '\n' << std::flush;
        err_ << line << '\n';
      });
  transducer::SaveCheckpoint(out_path_, result.model, vocab);

  ordered_json summary;
  summary["architecture"] =
      transducer::ArchitectureName(model_config.architecture);
  summary["alpha"] = settings.alpha;
  summary["samples"] = corpus.size();
  summary["punctuated"] = corpus.PunctuatedCount();
  summary["epochs"] = result.log.size();
  summary["final_loss"] =
      result.log.empty() ? json(nullptr) : json(result.log.back().loss);
  summary["parameters"] = result.model.weights().ParameterCount();
  summary["checkpoint"] = out_path_;
  out_ << summary.dump(2) << '\n';
}

void Tool::Decode() {
  const transducer::Checkpoint ckpt = transducer::LoadCheckpoint(checkpoint_);
  const auto modes = RequestedModes(mode_, ckpt.model);
  for (const pipeline::FeatureRow& row : pipeline::ReadFeatureRows(features_)) {
    CheckFeatureDim(ckpt.model, row);
    for (transducer::ModeId m : modes) {
      ordered_json j;
      j["id"] = row.utterance_id;
      j["mode"] = transducer::ModeName(m);
      j["text"] = DecodeText(ckpt.model, ckpt.vocabulary, row.features, m,
                             config_.punctuation, max_symbols_);
      out_ << j.dump() << '\n';
    }
  }
}

void Tool::RtfBench() {
  const std::vector<pipeline::FeatureRow> rows =
      pipeline::ReadFeatureRows(features_);
  std::vector<std::string> missing;
  for (const auto& row : rows)
    if (!row.audio_seconds) missing.push_back(row.utterance_id);
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    throw MissingAudioError("rows without audio_seconds: " + ids);
  }
  // Loaded once; utterances are decoded one after another on this thread.
  const transducer::Checkpoint ckpt = transducer::LoadCheckpoint(checkpoint_);
  const transducer::ModeId mode = RequestedModes(mode_, ckpt.model).front();

  ordered_json utts = ordered_json::array();
  double total_audio = 0.0, total_inference = 0.0;
  for (const pipeline::FeatureRow& row : rows) {
    CheckFeatureDim(ckpt.model, row);
    const auto start = std::chrono::steady_clock::now();
    const std::string text = DecodeText(ckpt.model, ckpt.vocabulary,
                                        row.features, mode,
                                        config_.punctuation, max_symbols_);
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    total_audio += *row.audio_seconds;
    total_inference += seconds;
    ordered_json u;
    u["id"] = row.utterance_id;
    u["text"] = text;
    u["audio_seconds"] = *row.audio_seconds;
    u["inference_seconds"] = seconds;
    u["rtf"] = metrics::Rtf(seconds, *row.audio_seconds);
    utts.push_back(std::move(u));
  }
  ordered_json j;
  j["mode"] = transducer::ModeName(mode);
  j["utterances"] = std::move(utts);
  j["total"] = {{"audio_seconds", total_audio},
                {"inference_seconds", total_inference},
                {"rtf", metrics::Rtf(total_inference, total_audio)}};
  out_ << j.dump(2) << '\n';
}

void Tool::Significance() {
  const auto& cfg = config_.punctuation;
  const auto refs = ReadTranscriptsFrom(ref_, in_, cfg);
  const auto pairs_a = metrics::PairById(refs, ReadTranscriptsFrom(hyp_, in_, cfg));
  const auto pairs_b =
      metrics::PairById(refs, ReadTranscriptsFrom(hyp_b_, in_, cfg));
  std::vector<metrics::MetricReport> a, b;
  for (const auto& p : pairs_a) a.push_back(metrics::ComputeMetrics(p.ref, p.hyp));
  for (const auto& p : pairs_b) b.push_back(metrics::ComputeMetrics(p.ref, p.hyp));
  const metrics::MetricKind kind = *metrics::ParseMetric(metric_);
  ordered_json j;
  j["metric"] = metrics::MetricName(kind);
  const auto result =
      metrics::SignificanceToJson(metrics::MatchedPairsTest(a, b, kind));
  for (const auto& [key, value] : result.items()) j[key] = value;
  out_ << j.dump(2) << '\n';
}

}  // namespace

int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  return Tool(in, out, err).Run(args);
}

}  // namespace pcasr::cli
