// tests/oracles/oracles.h

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

// Slow, independent reference implementations used only by the tests. None
// of them shares code with the library they check.

#ifndef PCASR_TESTS_ORACLES_ORACLES_H_
#define PCASR_TESTS_ORACLES_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace pcasr::oracle {

// ---------------------------------------------------------------------------
// Tokenizer: a character-at-a-time state machine over already-NFC text whose
// whitespace is limited to ASCII blanks and U+00A0, U+2003, U+3000.

struct RefToken {
  std::string surface;
  bool is_mark = false;
  bool operator==(const RefToken&) const = default;
};

inline std::vector<char32_t> DecodeUtf8(const std::string& s) {
  std::vector<char32_t> out;
  for (size_t i = 0; i < s.size();) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    int extra = c < 0x80 ? 0 : c < 0xE0 ? 1 : c < 0xF0 ? 2 : 3;
    char32_t cp = extra == 0 ? c : extra == 1 ? (c & 0x1F)
                                   : extra == 2 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k <= extra; ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += 1 + extra;
  }
  return out;
}

inline std::string EncodeUtf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

inline bool RefIsSpace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' ||
         c == U'\v' || c == U'\f' || c == 0x00A0 || c == 0x2003 ||
         c == 0x3000;
}

inline std::vector<RefToken> RefTokenize(const std::string& text,
                                         const std::u32string& marks) {
  std::vector<RefToken> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back({word, false});
    word.clear();
  };
  for (char32_t c : DecodeUtf8(text)) {
    if (RefIsSpace(c)) {
      flush();
    } else if (marks.find(c) != std::u32string::npos) {
      flush();
      out.push_back({EncodeUtf8(c), true});
    } else {
      word += EncodeUtf8(c);
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Alignment: depth-first enumeration of every monotone alignment, walking
// from the ends of both sequences. Branch order (match, substitution,
// deletion, insertion) makes the first alignment found at a given cost the
// preferred one among equals, and branches are cut only with admissible
// lower bounds, so the result is the exact optimum.

struct RefAlignment {
  int64_t substitutions = 0, deletions = 0, insertions = 0, matches = 0;
  int64_t errors() const { return substitutions + deletions + insertions; }
};

class ExhaustiveAligner {
 public:
  ExhaustiveAligner(const std::vector<int>& ref, const std::vector<int>& hyp)
      : ref_(ref), hyp_(hyp) {}

  RefAlignment Run() {
    best_cost_ = std::numeric_limits<int64_t>::max();
    Visit(ref_.size(), hyp_.size(), RefAlignment{});
    return best_;
  }

  // Complete alignments visited; lets tests confirm the search ran.
  int64_t leaves() const { return leaves_; }

 private:
  // Fewest errors any completion of ref[0..i) vs hyp[0..j) can have: one
  // per unmatched length difference, and one per symbol occurrence that has
  // no partner left on the other side.
  int64_t LowerBound(size_t i, size_t j) const {
    std::map<int, int64_t> ref_count, hyp_count;
    for (size_t k = 0; k < i; ++k) ++ref_count[ref_[k]];
    for (size_t k = 0; k < j; ++k) ++hyp_count[hyp_[k]];
    int64_t common = 0;
    for (const auto& [sym, n] : ref_count) {
      auto it = hyp_count.find(sym);
      if (it != hyp_count.end()) common += std::min(n, it->second);
    }
    const int64_t longer = static_cast<int64_t>(std::max(i, j));
    return longer - common;
  }

  void Visit(size_t i, size_t j, RefAlignment acc) {
    if (acc.errors() + LowerBound(i, j) >= best_cost_) return;
    if (i == 0 && j == 0) {
      ++leaves_;
      best_cost_ = acc.errors();
      best_ = acc;
      return;
    }
    if (i > 0 && j > 0) {
      RefAlignment next = acc;
      if (ref_[i - 1] == hyp_[j - 1]) {
        ++next.matches;
      } else {
        ++next.substitutions;
      }
      Visit(i - 1, j - 1, next);
    }
    if (i > 0) {
      RefAlignment next = acc;
      ++next.deletions;
      Visit(i - 1, j, next);
    }
    if (j > 0) {
      RefAlignment next = acc;
      ++next.insertions;
      Visit(i, j - 1, next);
    }
  }

  const std::vector<int>& ref_;
  const std::vector<int>& hyp_;
  int64_t best_cost_ = 0;
  RefAlignment best_;
  int64_t leaves_ = 0;
};

// ---------------------------------------------------------------------------
// Transducer loss: sum of path probabilities over every blank-augmented
// alignment, computed in the probability domain by explicit enumeration.
// `log_probs(t, u, k)` is the log-probability of symbol k at lattice node
// (t, u); index `blank` is the blank. Paths move right on blank and up on
// the next label, and end with a blank from (T-1, U).

inline double BruteForceTransducerLoss(
    size_t frames, const std::vector<int>& labels, int blank,
    const std::function<double(size_t, size_t, int)>& log_probs) {
  const size_t n_labels = labels.size();
  double total = 0.0;
  std::function<void(size_t, size_t, double)> walk = [&](size_t t, size_t u,
                                                          double p) {
    if (t == frames - 1 && u == n_labels) {
      total += p * std::exp(log_probs(t, u, blank));
      return;
    }
    if (u < n_labels) walk(t, u + 1, p * std::exp(log_probs(t, u, labels[u])));
    if (t + 1 < frames) walk(t + 1, u, p * std::exp(log_probs(t, u, blank)));
  };
  walk(0, 0, 1.0);
  return -std::log(total);
}

// Number of paths enumerated by BruteForceTransducerLoss: C(T-1+U, U).
inline uint64_t TransducerPathCount(size_t frames, size_t n_labels) {
  uint64_t c = 1;
  for (size_t k = 1; k <= n_labels; ++k) c = c * (frames - 1 + k) / k;
  return c;
}

// ---------------------------------------------------------------------------
// Central finite differences of a scalar function, one coordinate at a time.

inline std::vector<double> CentralDifferences(
    std::vector<double> x, const std::function<double(const std::vector<double>&)>& f,
    double h) {
  std::vector<double> grad(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double plus = f(x);
    x[i] = saved - h;
    const double minus = f(x);
    x[i] = saved;
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

// |a - b| / max(|a|, |b|, floor); the floor keeps coordinates whose true
// derivative is zero from dividing rounding noise by nothing.
inline double RelativeError(double a, double b, double floor = 1e-7) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace pcasr::oracle

#endif  // PCASR_TESTS_ORACLES_ORACLES_H_
