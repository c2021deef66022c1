// pcasr/metrics/metrics.h

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

#ifndef PCASR_METRICS_METRICS_H_
#define PCASR_METRICS_METRICS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcasr/metrics/alignment.h"
#include "pcasr/text/text_model.h"

namespace pcasr::metrics {

// Exact ratio of two counts, kept in lowest terms with a positive
// denominator.
class Rational {
 public:
  Rational(int64_t numerator, int64_t denominator);

  int64_t numerator() const { return num_; }
  int64_t denominator() const { return den_; }
  double value() const { return static_cast<double>(num_) / den_; }
  bool negative() const { return num_ < 0; }

  // 100 * value rounded half away from zero to two decimals, e.g. "9.32".
  std::string Percent() const;

  bool operator==(const Rational&) const = default;

 private:
  int64_t num_;
  int64_t den_;
};

enum class MetricKind { kWer, kPuncEr, kCaseEr, kPcWer };

std::string_view MetricName(MetricKind kind);  // "wer", "puncer", ...
std::optional<MetricKind> ParseMetric(std::string_view name);

// Raw view-level error counts and reference sizes. Rates are derived on
// demand so they always agree with the counts:
//   WER    = E_np-nc / N_np-nc          PC-WER = E_p-c / N_p-c
//   PuncER = (E_p-nc - E_np-nc) / N_p   CaseER = (E_np-c - E_np-nc) / N_c
// A rate whose denominator is zero is absent.
struct MetricReport {
  int64_t e_pc = 0;
  int64_t e_pnc = 0;
  int64_t e_npc = 0;
  int64_t e_npnc = 0;
  int64_t n_pc = 0;
  int64_t n_npnc = 0;
  int64_t n_p = 0;
  int64_t n_c = 0;

  std::optional<Rational> Wer() const;
  std::optional<Rational> PuncEr() const;
  std::optional<Rational> CaseEr() const;
  std::optional<Rational> PcWer() const;
  std::optional<Rational> Rate(MetricKind kind) const;

  // Signed error count in the numerator of `kind`.
  int64_t Numerator(MetricKind kind) const;
  // PuncER or CaseER came out below zero.
  bool negative_rate() const;

  MetricReport& operator+=(const MetricReport& other);
  bool operator==(const MetricReport&) const = default;
};

MetricReport operator+(MetricReport a, const MetricReport& b);

nlohmann::ordered_json ReportToJson(const MetricReport& report);

struct UtteranceScore {
  std::string utterance_id;
  MetricReport report;
  // Indexed by ViewKind order (PC, PNC, NPC, NPNC).
  std::array<AlignmentResult, 4> alignments;
  std::array<std::vector<text::Token>, 4> ref_views;
  std::array<std::vector<text::Token>, 4> hyp_views;
};

// Aligns each of the four views of ref against hyp and collects counts.
MetricReport ComputeMetrics(const text::Transcript& ref,
                            const text::Transcript& hyp);
UtteranceScore ScoreUtterance(const text::Transcript& ref,
                              const text::Transcript& hyp);
// Convenience for raw strings tokenized under `cfg`.
MetricReport ComputeMetrics(std::string_view ref, std::string_view hyp,
                            const text::PunctuationConfig& cfg);

struct TranscriptPair {
  text::Transcript ref;
  text::Transcript hyp;
};

// Pairs hypotheses with references by utterance id, in reference order.
// Throws IdMismatchError listing missing, extra and duplicated ids.
std::vector<TranscriptPair> PairById(std::span<const text::Transcript> refs,
                                     std::span<const text::Transcript> hyps);

struct CorpusScore {
  MetricReport total;
  std::vector<UtteranceScore> utterances;
};

// Sums counts over utterances (rates come from the summed counts). Each
// pair's ids must agree. Scoring fans out over `threads` workers; the
// result does not depend on the thread count.
CorpusScore CorpusMetrics(std::span<const TranscriptPair> pairs,
                          size_t threads = 1);

struct SignificanceResult {
  double statistic = 0.0;
  double p_value = 1.0;
  size_t n_segments = 0;
  // Zero variance across segments; see MatchedPairsTest.
  bool degenerate = false;
};

// Matched-pairs sentence-segment test on per-segment differences of the
// metric's numerator error count (A minus B). Z = mean / (sd / sqrt(n)) with
// a two-sided normal p-value. With zero variance the statistic is 0 / p = 1
// when the mean is zero, and +/-1e9 / p = 0 otherwise.
SignificanceResult MatchedPairsTest(std::span<const MetricReport> system_a,
                                    std::span<const MetricReport> system_b,
                                    MetricKind metric);

nlohmann::ordered_json SignificanceToJson(const SignificanceResult& result);

// Real-time factor: inference time over audio duration.
double Rtf(double inference_seconds, double audio_seconds);

}  // namespace pcasr::metrics

#endif  // PCASR_METRICS_METRICS_H_
