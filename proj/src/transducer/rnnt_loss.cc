// src/transducer/rnnt_loss.cc

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

#include "pcasr/transducer/rnnt_loss.h"

#include <cmath>
#include <limits>
#include <vector>

#include "pcasr/error.h"

namespace pcasr::transducer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

void CheckInputs(const LogitLattice& lattice, std::span<const int> target,
                 int blank, LatticeCheck check) {
  if (lattice.frames() == 0) {
    throw Error("transducer loss needs at least one encoder frame");
  }
  if (lattice.label_positions() != target.size() + 1) {
    throw Error("lattice has " + std::to_string(lattice.label_positions()) +
                " label positions, target needs " +
                std::to_string(target.size() + 1));
  }
  const int vocab = static_cast<int>(lattice.vocab_size());
  if (blank < 0 || blank >= vocab) throw Error("blank index out of range");
  for (int y : target) {
    if (y < 0 || y >= vocab || y == blank) {
      throw Error("target token " + std::to_string(y) +
                  " is blank or out of range");
    }
  }
  if (check == LatticeCheck::kNormalized &&
      !(lattice.MaxNormalizationError() <= kLatticeNormTolerance)) {
    throw Error("lattice cells are not normalized log-distributions");
  }
}

// alpha(t, u): log-weight of all partial paths reaching (t, u) before its
// outgoing transition.
std::vector<double> Forward(const LogitLattice& lp,
                            std::span<const int> target, int blank) {
  const size_t T = lp.frames(), U1 = lp.label_positions();
  std::vector<double> alpha(T * U1, kNegInf);
  alpha[0] = 0.0;
  for (size_t t = 0; t < T; ++t) {
    for (size_t u = 0; u < U1; ++u) {
      if (t == 0 && u == 0) continue;
      double a = kNegInf;
      if (t > 0) a = alpha[(t - 1) * U1 + u] + lp.at(t - 1, u, blank);
      if (u > 0) {
        a = LogAddExp(a, alpha[t * U1 + u - 1] + lp.at(t, u - 1, target[u - 1]));
      }
      alpha[t * U1 + u] = a;
    }
  }
  return alpha;
}

// beta(t, u): log-weight of all path suffixes from (t, u) to termination.
std::vector<double> Backward(const LogitLattice& lp,
                             std::span<const int> target, int blank) {
  const size_t T = lp.frames(), U1 = lp.label_positions();
  std::vector<double> beta(T * U1, kNegInf);
  for (size_t t = T; t-- > 0;) {
    for (size_t u = U1; u-- > 0;) {
      if (t == T - 1 && u == U1 - 1) {
        beta[t * U1 + u] = lp.at(t, u, blank);
        continue;
      }
      double b = kNegInf;
      if (t + 1 < T) b = beta[(t + 1) * U1 + u] + lp.at(t, u, blank);
      if (u + 1 < U1) {
        b = LogAddExp(b, beta[t * U1 + u + 1] + lp.at(t, u, target[u]));
      }
      beta[t * U1 + u] = b;
    }
  }
  return beta;
}

}  // namespace

LogitLattice::LogitLattice(size_t frames, size_t label_positions,
                           size_t vocab_size)
    : frames_(frames),
      positions_(label_positions),
      values_(Matrix::Zero(frames * label_positions, vocab_size)) {
  if (label_positions == 0) throw Error("lattice needs U + 1 >= 1 positions");
}

double LogitLattice::MaxNormalizationError() const {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    const double m = values_.row(r).maxCoeff();
    const double lse = m + std::log((values_.row(r).array() - m).exp().sum());
    worst = std::max(worst, std::fabs(lse));
    if (std::isnan(lse)) return lse;
  }
  return worst;
}

double RnntLoss(const LogitLattice& lattice, std::span<const int> target,
                int blank, LatticeCheck check) {
  CheckInputs(lattice, target, blank, check);
  const std::vector<double> alpha = Forward(lattice, target, blank);
  const size_t T = lattice.frames(), U = target.size();
  return -(alpha[(T - 1) * (U + 1) + U] + lattice.at(T - 1, U, blank));
}

RnntLossAndGrad RnntLossGrad(const LogitLattice& lattice,
                             std::span<const int> target, int blank,
                             LatticeCheck check) {
  CheckInputs(lattice, target, blank, check);
  const std::vector<double> alpha = Forward(lattice, target, blank);
  const std::vector<double> beta = Backward(lattice, target, blank);
  const size_t T = lattice.frames(), U1 = lattice.label_positions();
  const double log_prob = alpha[(T - 1) * U1 + U1 - 1] +
                          lattice.at(T - 1, U1 - 1, blank);

  RnntLossAndGrad out;
  out.loss = -log_prob;
  out.grad = LogitLattice(T, U1, lattice.vocab_size());
  for (size_t t = 0; t < T; ++t) {
    for (size_t u = 0; u < U1; ++u) {
      const double a = alpha[t * U1 + u];
      if (t + 1 < T) {
        out.grad.at(t, u, blank) = -std::exp(
            a + lattice.at(t, u, blank) + beta[(t + 1) * U1 + u] - log_prob);
      } else if (u + 1 == U1) {
        out.grad.at(t, u, blank) =
            -std::exp(a + lattice.at(t, u, blank) - log_prob);
      }
      if (u + 1 < U1) {
        const int y = target[u];
        out.grad.at(t, u, y) = -std::exp(a + lattice.at(t, u, y) +
                                         beta[t * U1 + u + 1] - log_prob);
      }
    }
  }
  return out;
}

}  // namespace pcasr::transducer
