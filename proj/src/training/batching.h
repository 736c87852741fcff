// Copyright 2026 The deskasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DESKASR_TRAINING_BATCHING_H_
#define DESKASR_TRAINING_BATCHING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "encoder/utterance.h"
#include "frontend/fbank.h"
#include "numerics/rng.h"

namespace deskasr::training {

// One normalized training example.
struct Example {
  std::string utt_id;
  frontend::FeatureMatrix features;  // after CMVN
  std::vector<int> targets;          // without sos/eos
  std::string transcript;
};

using Batch = std::vector<size_t>;  // indices into the example list

// Length-sorted bucketing under a frame budget; every batch holds at least
// one example. When `rng` is given the batch order is shuffled. Examples
// with empty targets are rejected.
std::vector<Batch> MakeBatches(std::span<const Example> examples,
                               int64_t frame_budget, numerics::Rng* rng);

template <typename T>
numerics::Tensor<T> FeaturesToTensor(const frontend::FeatureMatrix& f) {
  std::vector<T> data(f.values.begin(), f.values.end());
  return numerics::Tensor<T>::FromData({f.num_frames, frontend::kNumMelBins},
                                       std::move(data));
}

}  // namespace deskasr::training

#endif  // DESKASR_TRAINING_BATCHING_H_
