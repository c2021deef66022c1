// pcasr/pipeline/batching.h

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

#ifndef PCASR_PIPELINE_BATCHING_H_
#define PCASR_PIPELINE_BATCHING_H_

#include <random>
#include <vector>

namespace pcasr::pipeline {

using Batches = std::vector<std::vector<size_t>>;

// Shuffles 0..n-1 and cuts it into ceil(n / batch_size) near-equal batches.
Batches ShuffledBatches(size_t n, size_t batch_size, std::mt19937_64& rng);

// Like ShuffledBatches, but punctuated (`has_punct[i]`) and normalized-only
// samples are shuffled separately and dealt so that every batch holds the
// corpus share of punctuated samples to within one sample.
Batches StratifiedBatches(const std::vector<bool>& has_punct,
                          size_t batch_size, std::mt19937_64& rng);

}  // namespace pcasr::pipeline

#endif  // PCASR_PIPELINE_BATCHING_H_
