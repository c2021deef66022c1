// pcasr/transducer/rnnt_loss.h

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

#ifndef PCASR_TRANSDUCER_RNNT_LOSS_H_
#define PCASR_TRANSDUCER_RNNT_LOSS_H_

#include <span>

#include "pcasr/transducer/types.h"

namespace pcasr::transducer {

// T x (U+1) x V joiner log-probabilities. Cell (t, u) is row t * (U+1) + u
// of values(), one column per vocabulary entry.
class LogitLattice {
 public:
  LogitLattice() = default;
  LogitLattice(size_t frames, size_t label_positions, size_t vocab_size);

  size_t frames() const { return frames_; }
  // U + 1.
  size_t label_positions() const { return positions_; }
  size_t vocab_size() const { return static_cast<size_t>(values_.cols()); }

  double& at(size_t t, size_t u, size_t k) {
    return values_(t * positions_ + u, k);
  }
  double at(size_t t, size_t u, size_t k) const {
    return values_(t * positions_ + u, k);
  }

  Matrix& values() { return values_; }
  const Matrix& values() const { return values_; }

  // Largest |log-sum-exp| over cells.
  double MaxNormalizationError() const;

 private:
  size_t frames_ = 0;
  size_t positions_ = 1;
  Matrix values_;
};

enum class LatticeCheck {
  // Reject lattices whose cells are not log-distributions (|lse| > 1e-9).
  kNormalized,
  // Treat the entries as free log-weights. Used for derivative checks.
  kNone,
};

inline constexpr double kLatticeNormTolerance = 1e-9;

// -log P(target | X): log-space forward recursion over all monotonic
// blank-augmented alignments. Throws Error on T = 0, a length mismatch, a
// blank or out-of-range target, or (under kNormalized) an unnormalized cell.
double RnntLoss(const LogitLattice& lattice, std::span<const int> target,
                int blank = 0, LatticeCheck check = LatticeCheck::kNormalized);

struct RnntLossAndGrad {
  double loss = 0.0;
  // d loss / d lattice entry; zero off the blank/target transitions that lie
  // on some complete path.
  LogitLattice grad;
};

RnntLossAndGrad RnntLossGrad(const LogitLattice& lattice,
                             std::span<const int> target, int blank = 0,
                             LatticeCheck check = LatticeCheck::kNormalized);

}  // namespace pcasr::transducer

#endif  // PCASR_TRANSDUCER_RNNT_LOSS_H_
