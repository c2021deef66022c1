// src/pipeline/batching.cc

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

#include "pcasr/pipeline/batching.h"

#include <algorithm>
#include <numeric>

#include "pcasr/error.h"

namespace pcasr::pipeline {

namespace {

// Size of part b when `total` items are spread over `parts` parts.
size_t Share(size_t total, size_t parts, size_t b) {
  return (b + 1) * total / parts - b * total / parts;
}

}  // namespace

Batches ShuffledBatches(size_t n, size_t batch_size, std::mt19937_64& rng) {
  if (batch_size == 0) throw Error("batch size must be positive");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const size_t parts = (n + batch_size - 1) / batch_size;
  Batches out;
  size_t pos = 0;
  for (size_t b = 0; b < parts; ++b) {
    const size_t size = Share(n, parts, b);
    out.emplace_back(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return out;
}

Batches StratifiedBatches(const std::vector<bool>& has_punct,
                          size_t batch_size, std::mt19937_64& rng) {
  if (batch_size == 0) throw Error("batch size must be positive");
  std::vector<size_t> punct, plain;
  for (size_t i = 0; i < has_punct.size(); ++i) {
    (has_punct[i] ? punct : plain).push_back(i);
  }
  std::shuffle(punct.begin(), punct.end(), rng);
  std::shuffle(plain.begin(), plain.end(), rng);
  const size_t n = has_punct.size();
  const size_t k = punct.size();
  const size_t parts = (n + batch_size - 1) / batch_size;
  // Punctuated samples placed in the first c samples: round(c * k / n).
  // Each batch then holds within half a sample of its proportional share.
  auto placed = [&](size_t c) { return (2 * c * k + n) / (2 * n); };
  Batches out;
  size_t begin = 0, next_plain = 0;
  for (size_t b = 0; b < parts; ++b) {
    const size_t end = begin + Share(n, parts, b);
    const size_t lo = placed(begin), hi = placed(end);
    std::vector<size_t> batch(punct.begin() + lo, punct.begin() + hi);
    const size_t plain_take = (end - begin) - (hi - lo);
    batch.insert(batch.end(), plain.begin() + next_plain,
                 plain.begin() + next_plain + plain_take);
    next_plain += plain_take;
    out.push_back(std::move(batch));
    begin = end;
  }
  return out;
}

}  // namespace pcasr::pipeline
