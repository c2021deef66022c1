// src/metrics/metrics.cc

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

#include "pcasr/metrics/metrics.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "pcasr/error.h"

namespace pcasr::metrics {

using text::Token;
using text::Transcript;
using text::ViewKind;

Rational::Rational(int64_t numerator, int64_t denominator) {
  if (denominator == 0) throw Error("rational with zero denominator");
  if (denominator < 0) numerator = -numerator, denominator = -denominator;
  const int64_t g = std::gcd(numerator, denominator);
  num_ = numerator / g;
  den_ = denominator / g;
}

std::string Rational::Percent() const {
  const int64_t scaled = num_ * 10000;
  int64_t q = scaled / den_;
  const int64_t r = scaled % den_;
  if (2 * std::llabs(r) >= den_) q += scaled < 0 ? -1 : 1;
  std::string out = q < 0 ? "-" : "";
  const int64_t a = std::llabs(q);
  const int64_t frac = a % 100;
  out += std::to_string(a / 100) + "." + (frac < 10 ? "0" : "") +
         std::to_string(frac);
  return out;
}

std::string_view MetricName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kWer: return "wer";
    case MetricKind::kPuncEr: return "puncer";
    case MetricKind::kCaseEr: return "caseer";
    case MetricKind::kPcWer: return "pcwer";
  }
  return "?";
}

std::optional<MetricKind> ParseMetric(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
  if (n == "wer") return MetricKind::kWer;
  if (n == "puncer") return MetricKind::kPuncEr;
  if (n == "caseer") return MetricKind::kCaseEr;
  if (n == "pcwer") return MetricKind::kPcWer;
  return std::nullopt;
}

namespace {

std::optional<Rational> Ratio(int64_t num, int64_t den) {
  if (den <= 0) return std::nullopt;
  return Rational(num, den);
}

}  // namespace

std::optional<Rational> MetricReport::Wer() const {
  return Ratio(e_npnc, n_npnc);
}
std::optional<Rational> MetricReport::PuncEr() const {
  return Ratio(e_pnc - e_npnc, n_p);
}
std::optional<Rational> MetricReport::CaseEr() const {
  return Ratio(e_npc - e_npnc, n_c);
}
std::optional<Rational> MetricReport::PcWer() const {
  return Ratio(e_pc, n_pc);
}

std::optional<Rational> MetricReport::Rate(MetricKind kind) const {
  switch (kind) {
    case MetricKind::kWer: return Wer();
    case MetricKind::kPuncEr: return PuncEr();
    case MetricKind::kCaseEr: return CaseEr();
    case MetricKind::kPcWer: return PcWer();
  }
  return std::nullopt;
}

int64_t MetricReport::Numerator(MetricKind kind) const {
  switch (kind) {
    case MetricKind::kWer: return e_npnc;
    case MetricKind::kPuncEr: return e_pnc - e_npnc;
    case MetricKind::kCaseEr: return e_npc - e_npnc;
    case MetricKind::kPcWer: return e_pc;
  }
  return 0;
}

bool MetricReport::negative_rate() const {
  return (n_p > 0 && e_pnc < e_npnc) || (n_c > 0 && e_npc < e_npnc);
}

MetricReport& MetricReport::operator+=(const MetricReport& o) {
  e_pc += o.e_pc;
  e_pnc += o.e_pnc;
  e_npc += o.e_npc;
  e_npnc += o.e_npnc;
  n_pc += o.n_pc;
  n_npnc += o.n_npnc;
  n_p += o.n_p;
  n_c += o.n_c;
  return *this;
}

MetricReport operator+(MetricReport a, const MetricReport& b) { return a += b; }

nlohmann::ordered_json ReportToJson(const MetricReport& r) {
  nlohmann::ordered_json counts = {
      {"e_pc", r.e_pc},     {"e_pnc", r.e_pnc}, {"e_npc", r.e_npc},
      {"e_npnc", r.e_npnc}, {"n_pc", r.n_pc},   {"n_npnc", r.n_npnc},
      {"n_p", r.n_p},       {"n_c", r.n_c}};
  nlohmann::ordered_json rates;
  for (MetricKind kind : {MetricKind::kWer, MetricKind::kPuncEr,
                          MetricKind::kCaseEr, MetricKind::kPcWer}) {
    const auto rate = r.Rate(kind);
    if (!rate) {
      rates[std::string(MetricName(kind))] = nullptr;
      continue;
    }
    rates[std::string(MetricName(kind))] = {
        {"percent", rate->Percent()},
        {"fraction", std::to_string(rate->numerator()) + "/" +
                         std::to_string(rate->denominator())}};
  }
  nlohmann::ordered_json out = {{"counts", counts},
                                {"rates", rates},
                                {"negative_rate", r.negative_rate()}};
  return out;
}

UtteranceScore ScoreUtterance(const Transcript& ref, const Transcript& hyp) {
  UtteranceScore score;
  score.utterance_id = ref.utterance_id;
  for (size_t v = 0; v < text::kAllViews.size(); ++v) {
    score.ref_views[v] = text::Project(ref.tokens, text::kAllViews[v]);
    score.hyp_views[v] = text::Project(hyp.tokens, text::kAllViews[v]);
    score.alignments[v] = AlignTokens(score.ref_views[v], score.hyp_views[v]);
  }
  MetricReport& r = score.report;
  r.e_pc = score.alignments[0].errors();
  r.e_pnc = score.alignments[1].errors();
  r.e_npc = score.alignments[2].errors();
  r.e_npnc = score.alignments[3].errors();
  const auto& pc = score.ref_views[0];
  r.n_pc = static_cast<int64_t>(pc.size());
  r.n_npnc = static_cast<int64_t>(score.ref_views[3].size());
  r.n_p = std::count_if(pc.begin(), pc.end(), [](const Token& t) {
    return t.kind == text::TokenKind::kPunct;
  });
  const auto& npc = score.ref_views[2];
  r.n_c = std::count_if(npc.begin(), npc.end(), text::IsCased);
  return score;
}

MetricReport ComputeMetrics(const Transcript& ref, const Transcript& hyp) {
  return ScoreUtterance(ref, hyp).report;
}

MetricReport ComputeMetrics(std::string_view ref, std::string_view hyp,
                            const text::PunctuationConfig& cfg) {
  return ComputeMetrics(Transcript{"", text::Tokenize(ref, cfg), {}},
                        Transcript{"", text::Tokenize(hyp, cfg), {}});
}

std::vector<TranscriptPair> PairById(std::span<const Transcript> refs,
                                     std::span<const Transcript> hyps) {
  std::map<std::string, size_t> hyp_index;
  std::set<std::string> offending;
  for (size_t i = 0; i < hyps.size(); ++i) {
    if (!hyp_index.emplace(hyps[i].utterance_id, i).second) {
      offending.insert(hyps[i].utterance_id);
    }
  }
  std::set<std::string> seen;
  std::vector<TranscriptPair> pairs;
  for (const Transcript& ref : refs) {
    if (!seen.insert(ref.utterance_id).second) {
      offending.insert(ref.utterance_id);
      continue;
    }
    auto it = hyp_index.find(ref.utterance_id);
    if (it == hyp_index.end()) {
      offending.insert(ref.utterance_id);
      continue;
    }
    pairs.push_back({ref, hyps[it->second]});
  }
  for (const auto& [id, i] : hyp_index) {
    if (!seen.count(id)) offending.insert(id);
  }
  if (!offending.empty()) {
    std::vector<std::string> ids(offending.begin(), offending.end());
    std::string what = "utterance ids do not match between ref and hyp:";
    for (const auto& id : ids) what += " " + id;
    throw IdMismatchError(what, std::move(ids));
  }
  return pairs;
}

CorpusScore CorpusMetrics(std::span<const TranscriptPair> pairs,
                          size_t threads) {
  std::vector<std::string> mismatched;
  for (const auto& p : pairs) {
    if (p.ref.utterance_id != p.hyp.utterance_id) {
      mismatched.push_back(p.ref.utterance_id + "/" + p.hyp.utterance_id);
    }
  }
  if (!mismatched.empty()) {
    std::string what = "mismatched utterance ids in pairs:";
    for (const auto& id : mismatched) what += " " + id;
    throw IdMismatchError(what, std::move(mismatched));
  }

  CorpusScore out;
  out.utterances.resize(pairs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < pairs.size(); i = next++) {
      out.utterances[i] = ScoreUtterance(pairs[i].ref, pairs[i].hyp);
    }
  };
  threads = std::clamp<size_t>(threads, 1, std::max<size_t>(pairs.size(), 1));
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& u : out.utterances) out.total += u.report;
  return out;
}

SignificanceResult MatchedPairsTest(std::span<const MetricReport> a,
                                    std::span<const MetricReport> b,
                                    MetricKind metric) {
  if (a.size() != b.size()) {
    throw Error("significance test needs the same number of segments");
  }
  if (a.size() < 2) throw Error("significance test needs at least 2 segments");
  const size_t n = a.size();
  std::vector<double> diff(n);
  for (size_t i = 0; i < n; ++i) {
    diff[i] = static_cast<double>(a[i].Numerator(metric) -
                                  b[i].Numerator(metric));
  }
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double variance = ss / static_cast<double>(n - 1);

  SignificanceResult result;
  result.n_segments = n;
  if (variance == 0.0) {
    result.degenerate = true;
    if (mean == 0.0) {
      result.statistic = 0.0;
      result.p_value = 1.0;
    } else {
      result.statistic = mean > 0 ? 1e9 : -1e9;
      result.p_value = 0.0;
    }
    return result;
  }
  result.statistic = mean / std::sqrt(variance / static_cast<double>(n));
  result.p_value = std::clamp(
      std::erfc(std::fabs(result.statistic) / std::sqrt(2.0)), 0.0, 1.0);
  return result;
}

nlohmann::ordered_json SignificanceToJson(const SignificanceResult& r) {
  return {{"statistic", r.statistic},
          {"p_value", r.p_value},
          {"n_segments", r.n_segments},
          {"degenerate", r.degenerate}};
}

double Rtf(double inference_seconds, double audio_seconds) {
  if (!(audio_seconds > 0.0)) throw Error("RTF needs positive audio duration");
  if (!(inference_seconds >= 0.0)) {
    throw Error("RTF needs nonnegative inference time");
  }
  // Inputs are decimal measurements; keep the 15 significant digits a double
  // carries faithfully so that 4.4 / 10.0 reads back as 0.44.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.15g", inference_seconds / audio_seconds);
  return std::strtod(buf, nullptr);
}

}  // namespace pcasr::metrics
